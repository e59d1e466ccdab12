"""Flask application factory.

Yeh file Flask application ko initialize karta hai: configuration,
JSON API blueprint, logging, error handlers aur `flask kd` CLI commands.

"""

import logging
import os
from logging.handlers import RotatingFileHandler

from flask import Flask, jsonify

from config import get_config


__version__ = '0.1.0'


def create_app(env=None):
    """Build the kernel-duality API app.

    Config select karke validate karta hai, phir API blueprint, logging,
    JSON error handlers aur `flask kd` commands attach karta hai.

    Args:
        env (str): Config name (development/production/testing); None reads KERNEL_DUALITY_ENV

    Returns:
        Flask: App serving /api/v1

    Example:
        >>> app = create_app('testing')
        >>> app.test_client().get('/api/v1/health').status_code
        200
    """
    app = Flask(__name__)

    config_class = get_config(env)
    config_class.validate()
    app.config.from_object(config_class)
    app.json.sort_keys = app.config['JSON_SORT_KEYS']

    register_blueprints(app)
    setup_logging(app)
    register_error_handlers(app)
    register_commands(app)  # `flask kd ...`

    return app


def register_blueprints(app):
    """Register application blueprints.

    Args:
        app (Flask): Flask application instance
    """
    from kernel_duality.routes.api import api_bp

    app.register_blueprint(api_bp)


def setup_logging(app):
    """Setup application logging.

    Debug/testing ke alawa file-based logging configure karta hai. Handler
    app logger aur library logger dono par lagta hai, taaki services ke
    messages bhi same file mein jaayein.

    Args:
        app (Flask): Flask application instance
    """
    if app.debug or app.testing:
        return

    log_dir = app.config['LOG_DIR']
    os.makedirs(log_dir, exist_ok=True)

    file_handler = RotatingFileHandler(
        os.path.join(log_dir, app.config['LOG_FILE']),
        maxBytes=app.config['LOG_MAX_BYTES'],
        backupCount=app.config['LOG_BACKUP_COUNT']
    )
    file_handler.setFormatter(logging.Formatter(
        '%(asctime)s %(levelname)s: %(message)s '
        '[in %(pathname)s:%(lineno)d]'
    ))
    file_handler.setLevel(app.config['LOG_LEVEL'])

    library_logger = logging.getLogger('kernel_duality')
    for logger in (app.logger, library_logger):
        logger.addHandler(file_handler)
        logger.setLevel(app.config['LOG_LEVEL'])
    app.logger.info('kernel-duality API startup')


def register_error_handlers(app):
    """Register JSON error handlers.

    Library exceptions aur HTTP errors ko JSON responses mein convert karta hai.

    Args:
        app (Flask): Flask application instance
    """
    from kernel_duality.errors import NonConvergenceError, ReportError, ValidationError

    @app.errorhandler(ValidationError)
    def validation_error(error):
        """Handle invalid kernels and parameters."""
        return jsonify({'error': str(error)}), 400

    @app.errorhandler(ReportError)
    def report_error(error):
        """Handle unreadable files."""
        return jsonify({'error': str(error)}), 400

    @app.errorhandler(NonConvergenceError)
    def nonconvergence_error(error):
        """Handle solvers that hit their iteration cap."""
        app.logger.warning(f'non-convergence: {error}')
        return jsonify(error.to_dict()), 422

    @app.errorhandler(404)
    def not_found_error(error):
        """Handle 404 errors."""
        return jsonify({'error': 'not found'}), 404

    @app.errorhandler(405)
    def method_not_allowed_error(error):
        """Handle 405 errors."""
        return jsonify({'error': 'method not allowed'}), 405

    @app.errorhandler(500)
    def internal_error(error):
        """Handle 500 errors."""
        app.logger.error(f'internal error: {error}')
        return jsonify({'error': 'internal server error'}), 500


def register_commands(app):
    """Attach the click group to `flask kd`."""
    from kernel_duality.cli import main

    app.cli.add_command(main, name='kd')
