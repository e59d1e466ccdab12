"""Small shared helpers: settings lookup, seeds, number formatting."""

import numpy as np
from flask import current_app, has_app_context

from config import get_config


def get_setting(name, default=None):
    """Read a configuration value.

    App context ke andar `current_app.config` se, warna selected
    Config class se value leta hai.

    Args:
        name (str): Setting name, e.g. 'SURVIVAL_TOL'
        default: Value returned when the setting is missing

    Returns:
        The configured value or `default`
    """
    if has_app_context():
        return current_app.config.get(name, default)
    return getattr(get_config(), name, default)


def derive_seed(seed, *keys):
    """Derive a 32-bit seed from a base seed and integer keys.

    Example:
        >>> derive_seed(7, 0) == derive_seed(7, 0)
        True
    """
    entropy = [int(seed)] + [int(key) for key in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def stream(seed, *keys):
    """Independent numpy Generator for (seed, keys)."""
    return np.random.default_rng([int(seed)] + [int(key) for key in keys])


def round_sig(value, digits=None):
    """Round a float to `digits` significant digits (12 by default)."""
    if digits is None:
        digits = get_setting('SIGNIFICANT_DIGITS', 12)
    value = float(value)
    if not np.isfinite(value):
        return value
    return float(f'{value:.{digits}g}')


def format_real(value, digits=None):
    """Render a real with `digits` significant digits."""
    if digits is None:
        digits = get_setting('SIGNIFICANT_DIGITS', 12)
    return f'{float(value):.{digits}g}'


def to_plain(value):
    """Convert numpy containers and scalars into JSON-ready Python values."""
    if isinstance(value, np.ndarray):
        return [to_plain(item) for item in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [to_plain(item) for item in value]
    if isinstance(value, dict):
        return {key: to_plain(item) for key, item in value.items()}
    if isinstance(value, (np.floating, float)):
        return round_sig(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value
