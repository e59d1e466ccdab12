"""Configuration settings for kernel-duality.

Yeh file application ke saare configuration settings contain karti hai:
solver tolerances, enumeration caps, Monte-Carlo defaults aur logging.
Different environments (development, production, testing) ke liye
alag-alag configurations provide karta hai.

"""

import os
from dotenv import load_dotenv


# Load environment variables from .env file
load_dotenv()


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value else default


def _env_int(name, default):
    value = os.environ.get(name)
    return int(value) if value else default


def _env_ladder(name, default):
    value = os.environ.get(name)
    if not value:
        return default
    return tuple(int(part) for part in value.split(',') if part.strip())


class Config:
    """Base configuration class with common settings.

    Yeh base class hai jisme common settings hain jo
    sabhi environments mein use hoti hain.
    """

    # Flask Core Settings (JSON API)
    JSON_SORT_KEYS = False
    MAX_CONTENT_LENGTH = 2 * 1024 * 1024  # kernel payloads are small

    # Logging
    LOG_DIR = os.environ.get('LOG_DIR') or 'logs'
    LOG_FILE = os.environ.get('LOG_FILE') or 'kernel_duality.log'
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'
    # stderr level of the command line; LOG_LEVEL in the environment wins
    CLI_LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'
    LOG_MAX_BYTES = 10240000  # 10MB
    LOG_BACKUP_COUNT = 10

    # Measures and kernels
    MASS_TOL = _env_float('MASS_TOL', 1e-9)
    SIGNIFICANT_DIGITS = 12

    # Operator norm (dense up to DENSE_NORM_MAX_CLASSES, power iteration above)
    POWER_ITERATION_TOL = _env_float('POWER_ITERATION_TOL', 1e-10)
    POWER_ITERATION_MAX_ITER = _env_int('POWER_ITERATION_MAX_ITER', 10 ** 6)
    DENSE_NORM_MAX_CLASSES = _env_int('DENSE_NORM_MAX_CLASSES', 6)

    # Survival solver
    SURVIVAL_TOL = _env_float('SURVIVAL_TOL', 1e-12)
    SURVIVAL_MAX_ITER = _env_int('SURVIVAL_MAX_ITER', 10 ** 6)

    # Cut norm / cut distance
    CUT_NORM_EXACT_MAX_CLASSES = _env_int('CUT_NORM_EXACT_MAX_CLASSES', 24)
    CUT_DISTANCE_EXACT_MAX_CLASSES = _env_int('CUT_DISTANCE_EXACT_MAX_CLASSES', 8)
    CUT_HEURISTIC_RESTARTS = _env_int('CUT_HEURISTIC_RESTARTS', 32)
    CUT_DISTANCE_STARTS = _env_int('CUT_DISTANCE_STARTS', 8)
    CUT_DISTANCE_SCORE_EXACT_MAX_CLASSES = _env_int('CUT_DISTANCE_SCORE_EXACT_MAX_CLASSES', 12)

    # Trees and finite-size probabilities
    TREE_MAX_K = 8
    SPECTRUM_K_MAX = _env_int('SPECTRUM_K_MAX', 6)
    MC_CHUNK_SIZE = _env_int('MC_CHUNK_SIZE', 10000)

    # Experiments
    N_LADDER = _env_ladder('N_LADDER', (2000, 8000, 20000))
    DEFAULT_N = _env_int('DEFAULT_N', 20000)
    DEFAULT_REPETITIONS = _env_int('DEFAULT_REPETITIONS', 20)
    DEFAULT_SEED = _env_int('DEFAULT_SEED', 0)
    WORKERS = _env_int('WORKERS', 1)
    SAMPLE_ROW_CHUNK = _env_int('SAMPLE_ROW_CHUNK', 2048)
    SHOW_PROGRESS = True

    @classmethod
    def validate(cls):
        """Check settings that must hold before serving requests.

        Raises:
            ValueError: Non-positive tolerance or cap, or unknown LOG_LEVEL
        """
        for name in ('MASS_TOL', 'POWER_ITERATION_TOL', 'SURVIVAL_TOL'):
            if not getattr(cls, name) > 0:
                raise ValueError(f'{name} must be positive')
        for name in ('POWER_ITERATION_MAX_ITER', 'SURVIVAL_MAX_ITER', 'CUT_HEURISTIC_RESTARTS',
                     'MC_CHUNK_SIZE', 'SAMPLE_ROW_CHUNK', 'WORKERS'):
            if getattr(cls, name) < 1:
                raise ValueError(f'{name} must be at least 1')
        for name in ('LOG_LEVEL', 'CLI_LOG_LEVEL'):
            if getattr(cls, name).upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
                raise ValueError(f'unknown {name} {getattr(cls, name)!r}')
        return True


class DevelopmentConfig(Config):
    """Development environment configuration.

    Development ke liye debug mode aur detailed logs.
    """

    DEBUG = True
    TESTING = False
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'DEBUG'


class ProductionConfig(Config):
    """Production environment configuration.

    Production ke liye settings: debug off, file logging at LOG_LEVEL.
    """

    DEBUG = False
    TESTING = False


class TestingConfig(Config):
    """Testing environment configuration.

    Unit tests ke liye settings: chhote caps nahi, bas progress bars band.
    """

    TESTING = True
    DEBUG = True
    SHOW_PROGRESS = False
    WORKERS = 1


# Configuration dictionary for easy access
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config(env=None):
    """Get configuration object based on environment.

    Args:
        env (str): Environment name (development/production/testing)

    Returns:
        Config: Configuration class

    Example:
        >>> config = get_config('testing')
        >>> print(config.SURVIVAL_TOL)
        1e-12
    """
    if env is None:
        env = (os.environ.get('KERNEL_DUALITY_ENV')
               or os.environ.get('FLASK_ENV', 'development'))

    return config.get(env, config['default'])
