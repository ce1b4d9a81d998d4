from flask import Blueprint, request

from main.blueprints.responses import command_response, require
from main.services import commands

frames_bp = Blueprint('frames', __name__)


@frames_bp.route('/parse', methods=['POST'])
def parse():
    data = request.get_json(silent=True)
    sig, error = require(data, 'sig')
    if error:
        return error
    formula, error = require(data, 'formula')
    if error:
        return error
    return command_response(commands.run_parse, sig, formula)


@frames_bp.route('/check-frame', methods=['POST'])
def check_frame():
    frame, error = require(request.get_json(silent=True), 'frame')
    if error:
        return error
    return command_response(commands.run_check_frame, frame)


@frames_bp.route('/valid', methods=['POST'])
def valid():
    data = request.get_json(silent=True)
    frame, error = require(data, 'frame')
    if error:
        return error
    formula, error = require(data, 'formula')
    if error:
        return error
    return command_response(commands.run_valid, frame, formula)


@frames_bp.route('/mc', methods=['POST'])
def model_check():
    data = request.get_json(silent=True)
    for key in ('frame', 'valuation', 'formula'):
        _, error = require(data, key)
        if error:
            return error
    return command_response(commands.run_mc, data['frame'], data['valuation'], data['formula'])


@frames_bp.route('/ca', methods=['POST'])
def complex_algebra():
    frame, error = require(request.get_json(silent=True), 'frame')
    if error:
        return error
    return command_response(commands.run_ca, frame)


@frames_bp.route('/pe', methods=['POST'])
def prime_filter_extension():
    data = request.get_json(silent=True)
    frame, error = require(data, 'frame')
    if error:
        return error
    return command_response(commands.run_pe, frame, data.get('variant', 'tau'))


@frames_bp.route('/dot', methods=['POST'])
def dot():
    frame, error = require(request.get_json(silent=True), 'frame')
    if error:
        return error
    return command_response(commands.run_dot, frame)
