from ._cuckoowalk import (
    BudgetExceeded,
    ConvergenceError,
    CuckooTable,
    Error,
    HashFamily,
    InsufficientData,
    InvalidArgument,
    Strategy,
    WalkTrace,
    bad_set_report,
    build_csv,
    compare_csv,
    cycle_report,
    fill_table,
    maximum_matching_size,
    saddle_root,
    stirling_exact,
    stirling_moser_wyman_log,
    threshold,
    threshold_csv,
)


def parse_report(text):
    """Split key=value report lines into a dict of strings, keeping order."""
    return dict(line.split("=", 1) for line in text.splitlines() if line)


def parse_csv(text):
    """Rows of a schema=1 CSV as dicts keyed by the header columns."""
    lines = text.splitlines()
    header = lines[0].split(",")[1:]
    return [dict(zip(header, line.split(",")[1:])) for line in lines[1:]]
