from flask import Blueprint, request

from main.blueprints.responses import command_response, require
from main.services import commands

universe_bp = Blueprint('universe', __name__)


@universe_bp.route('/enum', methods=['POST'])
def enum():
    data = request.get_json(silent=True)
    kind, error = require(data, 'kind')
    if error:
        return error
    n, error = require(data, 'n')
    if error:
        return error
    return command_response(commands.run_enum, kind, n)


@universe_bp.route('/fr', methods=['POST'])
def fr():
    data = request.get_json(silent=True)
    for key in ('kind', 'n', 'axioms'):
        _, error = require(data, key)
        if error:
            return error
    return command_response(commands.run_fr, data['kind'], data['n'], data['axioms'],
                            sample=data.get('sample'), seed=data.get('seed', 0),
                            universe_sample=data.get('universe_sample'), allow_files=False)


@universe_bp.route('/audit', methods=['POST'])
def audit():
    data = request.get_json(silent=True)
    for key in ('kind', 'n', 'axioms'):
        _, error = require(data, key)
        if error:
            return error
    return command_response(commands.run_audit, data['kind'], data['n'], data['axioms'],
                            variant=data.get('variant', 'tau'), budget=data.get('budget'),
                            check_size=data.get('check_size'), universe_sample=data.get('universe_sample'),
                            seed=data.get('seed', 0), allow_files=False)
