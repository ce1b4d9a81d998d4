# Import the individual blueprints
from main.blueprints.frames import frames_bp
from main.blueprints.universe import universe_bp
from main.blueprints.health import health_bp

__all__ = ['frames_bp', 'universe_bp', 'health_bp']
