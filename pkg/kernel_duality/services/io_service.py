"""Kernel file reading and writing.

Yeh module kernel files parse aur write karta hai. Format:

    weights: [0.5, 0.5]
    values: [[3, 1],
             [1, 2]]

Ek value kai lines mein ho sakti hai; '#' ke baad comment. Same data ek
JSON object ke roop mein bhi chalta hai.

"""

import json
import logging
import re

import numpy as np

from kernel_duality.errors import ReportError, ValidationError
from kernel_duality.models.kernel import StepKernel
from kernel_duality.models.measure import WeightedMeasure
from kernel_duality.utils import format_real, get_setting


logger = logging.getLogger(__name__)

KEY_PATTERN = re.compile(r'^\s*(weights|values)\s*:', re.MULTILINE)


def _strip_comments(text):
    return '\n'.join(line.split('#', 1)[0] for line in text.splitlines())


def _sections(text):
    """Split `key: value` text into {key: raw value}."""
    matches = list(KEY_PATTERN.finditer(text))
    if not matches:
        raise ValidationError('kernel file needs "weights:" and "values:" entries')
    if text[:matches[0].start()].strip():
        raise ValidationError('unexpected text before the first kernel entry')
    sections = {}
    for index, match in enumerate(matches):
        end = matches[index + 1].start() if index + 1 < len(matches) else len(text)
        key = match.group(1)
        if key in sections:
            raise ValidationError(f'duplicate entry {key!r}')
        sections[key] = text[match.end():end].strip()
    return sections


def kernel_from_dict(data):
    """StepKernel from {"weights": [...], "values": [[...]]}.

    Weights within MASS_TOL of a probability vector are renormalized so that
    rounded decimal input (1/3 written as 0.333333333333) is accepted.
    """
    if not isinstance(data, dict):
        raise ValidationError('kernel must be an object with weights and values')
    missing = [key for key in ('weights', 'values') if key not in data]
    if missing:
        raise ValidationError(f'kernel is missing {", ".join(missing)}')
    try:
        weights = np.asarray(data['weights'], dtype=float)
        values = np.asarray(data['values'], dtype=float)
    except (TypeError, ValueError) as error:
        raise ValidationError(f'kernel entries must be numeric: {error}') from error

    tol = get_setting('MASS_TOL', 1e-9)
    total = weights.sum() if weights.ndim == 1 else 0.0
    if weights.ndim == 1 and weights.size and abs(total - 1.0) <= tol and np.all(weights >= 0):
        weights = weights / total
    return StepKernel(values, WeightedMeasure(weights))


def parse_kernel(text):
    """Parse kernel text (line format or JSON).

    Raises:
        ValidationError: Malformed text or an invalid kernel
    """
    stripped = text.strip()
    if stripped.startswith('{'):
        try:
            return kernel_from_dict(json.loads(stripped))
        except json.JSONDecodeError as error:
            raise ValidationError(f'invalid JSON kernel: {error}') from error

    sections = _sections(_strip_comments(text))
    data = {}
    for key, raw in sections.items():
        try:
            data[key] = json.loads(raw)
        except json.JSONDecodeError as error:
            raise ValidationError(f'cannot parse {key}: {error}') from error
    return kernel_from_dict(data)


def load_kernel(path):
    """Read and parse a kernel file.

    Raises:
        ReportError: File cannot be read
        ValidationError: Contents are not a valid kernel
    """
    try:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    except OSError as error:
        raise ReportError(f'cannot read kernel file {path}: {error}') from error
    kernel = parse_kernel(text)
    logger.debug(f'loaded {kernel.size}-class kernel from {path}')
    return kernel


def format_kernel(kernel):
    """Kernel file text with 12 significant digits."""
    weights = ', '.join(format_real(w) for w in kernel.weights)
    rows = [
        '[' + ', '.join(format_real(v) for v in row) + ']'
        for row in kernel.values
    ]
    body = (',\n' + ' ' * 9).join(rows)
    return f'weights: [{weights}]\nvalues: [{body}]\n'


def save_kernel(kernel, path):
    """Write a kernel file readable by load_kernel."""
    try:
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(format_kernel(kernel))
    except OSError as error:
        raise ReportError(f'cannot write kernel file {path}: {error}') from error
