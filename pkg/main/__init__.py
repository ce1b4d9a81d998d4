from typing import Optional

from flask import Flask

from main.config import Limits


def create_app(limits: Optional[Limits] = None, config_object=None):
    app = Flask(__name__)
    if config_object is not None:
        app.config.from_object(config_object)

    # Delayed import of blueprints
    from main.blueprints.frames import frames_bp
    from main.blueprints.universe import universe_bp
    from main.blueprints.health import health_bp

    # Register blueprints
    app.register_blueprint(frames_bp)
    app.register_blueprint(universe_bp)
    app.register_blueprint(health_bp)

    # Size caps every request runs under
    app.config['LIMITS'] = limits or Limits()

    return app
