"""Tests for kernel file parsing and writing."""

import pytest

from kernel_duality.errors import ReportError, ValidationError
from kernel_duality.models import StepKernel
from kernel_duality.services.io_service import (
    format_kernel,
    kernel_from_dict,
    load_kernel,
    parse_kernel,
    save_kernel,
)


TWO_TYPE_SPEC = """\
# two-class example
weights: [0.5, 0.5]
values: [[3, 1],   # first row
         [1, 2]]
"""


def test_parse_multiline_values():
    kernel = parse_kernel(TWO_TYPE_SPEC)
    assert kernel.weights.tolist() == [0.5, 0.5]
    assert kernel.values.tolist() == [[3.0, 1.0], [1.0, 2.0]]


def test_parse_json():
    kernel = parse_kernel('{"weights": [1.0], "values": [[2]]}')
    assert kernel.values.tolist() == [[2.0]]


def test_entry_order_does_not_matter():
    kernel = parse_kernel('values: [[0, 4], [4, 0]]\nweights: [0.5, 0.5]\n')
    assert kernel.values[0, 1] == 4.0


def test_rounded_weights_renormalized():
    kernel = parse_kernel('weights: [0.333333333333, 0.666666666667]\nvalues: [[1, 1], [1, 1]]')
    assert kernel.measure.is_probability
    assert kernel.weights.sum() == pytest.approx(1.0, abs=1e-15)


def test_non_probability_weights_kept():
    kernel = kernel_from_dict({'weights': [2.0], 'values': [[1.0]]})
    assert kernel.measure.total == 2.0


@pytest.mark.parametrize('text', [
    '',
    'weights: [1.0]',
    'weights: [1.0]\nvalues: [[1, 2]',
    'hello\nweights: [1.0]\nvalues: [[1]]',
    'weights: [1.0]\nweights: [1.0]\nvalues: [[1]]',
    'weights: [0.5, 0.5]\nvalues: [[1, 2], [3, 1]]',
    'weights: ["a"]\nvalues: [[1]]',
    '{"weights": [1.0], "values": [[1]]',
])
def test_malformed_specs(text):
    with pytest.raises(ValidationError):
        parse_kernel(text)


def test_kernel_from_dict_needs_object():
    with pytest.raises(ValidationError):
        kernel_from_dict([[1.0]])


def test_format_kernel():
    text = format_kernel(StepKernel([[3.0, 1.0], [1.0, 2.0]], [0.5, 0.5]))
    assert text == 'weights: [0.5, 0.5]\nvalues: [[3, 1],\n         [1, 2]]\n'


def test_save_and_load(tmp_path):
    kernel = StepKernel([[1 / 3, 0.125], [0.125, 7.0]], [0.25, 0.75])
    path = tmp_path / 'kernel.txt'
    save_kernel(kernel, str(path))
    loaded = load_kernel(str(path))
    assert loaded.values == pytest.approx(kernel.values, rel=1e-11)
    assert loaded.weights.tolist() == [0.25, 0.75]


def test_load_kernel_file(kernel_file):
    assert load_kernel(kernel_file(TWO_TYPE_SPEC)).size == 2


def test_load_missing_file(tmp_path):
    with pytest.raises(ReportError):
        load_kernel(str(tmp_path / 'missing.txt'))


def test_save_to_missing_directory(tmp_path):
    with pytest.raises(ReportError):
        save_kernel(StepKernel.constant(1.0), str(tmp_path / 'no' / 'kernel.txt'))
