"""Report export service.

Yeh module experiment reports ko CSV (pandas) ya JSON mein export karta hai.
CSV mein sirf per-seed rows hoti hain, fixed header ke saath; JSON mein
summary aur notes bhi.

"""

import io
import json
import logging

import pandas as pd

from kernel_duality.errors import ReportError, ValidationError
from kernel_duality.utils import get_setting, to_plain


logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json')


def report_to_csv(report):
    """CSV text of the report rows; headers only when there are no rows."""
    digits = get_setting('SIGNIFICANT_DIGITS', 12)
    frame = pd.DataFrame(report.rows, columns=report.columns)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=f'%.{digits}g', lineterminator='\n')
    return buffer.getvalue()


def report_to_json(report):
    """JSON text with keys in insertion order."""
    return json.dumps(to_plain(report.to_dict()), indent=2) + '\n'


def emit(report, format='csv', path=None):
    """Render a report and optionally write it.

    Args:
        report (ExperimentReport): Report to export
        format (str): 'csv' or 'json'
        path (str): Output file; None only renders

    Returns:
        str: Rendered text

    Raises:
        ReportError: Writing failed (message carries the path)

    Example:
        >>> text = emit(report, 'csv', 'giant.csv')  # doctest: +SKIP
    """
    if format not in FORMATS:
        raise ValidationError(f'unknown report format {format!r}')
    text = report_to_csv(report) if format == 'csv' else report_to_json(report)
    if path:
        try:
            with open(path, 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
        except OSError as error:
            raise ReportError(f'cannot write report to {path}: {error}') from error
        logger.info(f'{report.name} report written to {path}')
    return text


def load_report_csv(path):
    """Read an emitted CSV report back into a DataFrame.

    Raises:
        ReportError: File missing or unreadable
    """
    try:
        return pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as error:
        raise ReportError(f'cannot read report {path}: {error}') from error
