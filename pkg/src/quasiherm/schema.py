"""JSON Schema for the summary files written by the command-line runner."""

_CHECK = {
    'type': 'object',
    'required': ['name', 'residual', 'tolerance', 'passed'],
    'properties': {
        'name': {'type': 'string'},
        'residual': {'type': 'number'},
        'tolerance': {'type': 'number'},
        'passed': {'type': 'boolean'},
    },
    'additionalProperties': False,
}

SUMMARY_SCHEMA = {
    '$schema': 'https://json-schema.org/draft/2020-12/schema',
    'title': 'quasiherm scenario summary',
    'type': 'object',
    'required': ['mode', 'config', 'versions'],
    'properties': {
        'mode': {'enum': ['spectrum', 'metric', 'evolve', 'verify']},
        'config': {
            'type': 'object',
            'required': ['n', 'schedule', 'window', 'step', 'seed'],
            'properties': {
                'n': {'type': 'integer', 'minimum': 2},
                'schedule': {'type': 'object', 'required': ['kind']},
                'window': {'type': 'array', 'items': {'type': 'number'},
                           'minItems': 2, 'maxItems': 2},
                'step': {'type': 'number', 'exclusiveMinimum': 0},
                'seed': {'type': 'integer'},
            },
        },
        'versions': {
            'type': 'object',
            'required': ['quasiherm', 'numpy', 'scipy', 'python'],
            'additionalProperties': {'type': 'string'},
        },
        'columns': {'type': 'array', 'items': {'type': 'string'}},
        'method': {'enum': ['rk4', 'adaptive']},
        'checks': {'type': 'array', 'items': _CHECK},
        'passed': {'type': 'boolean'},
        'sample_times': {'type': 'array', 'items': {'type': 'number'}},
        'all_positive': {'type': 'boolean'},
        'norm_drift': {'type': 'number'},
        'max_consistency': {'type': 'number'},
        'warnings': {'type': 'array', 'items': {'type': 'string'}},
    },
    'allOf': [{
        'if': {'properties': {'mode': {'const': 'verify'}}},
        'then': {'required': ['checks', 'passed', 'method']},
    }],
}
