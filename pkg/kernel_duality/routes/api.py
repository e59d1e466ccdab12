"""REST API routes.

Yeh module kernel computations ke JSON endpoints provide karta hai.
Kernels body mein `{"weights": [...], "values": [[...]]}` ke roop mein aate hain.

"""

from flask import Blueprint, jsonify, request

from kernel_duality import __version__
from kernel_duality.errors import ValidationError
from kernel_duality.services.branching_service import rho_k_mc, rho_k_tree, survival
from kernel_duality.services.cut_service import cut_distance, cut_norm_exact, cut_norm_heuristic
from kernel_duality.services.duality_service import dual_subcritical_check, dualize, edge_split
from kernel_duality.services.io_service import kernel_from_dict
from kernel_duality.services.kernel_service import common_refinement, operator_norm
from kernel_duality.utils import get_setting, to_plain


api_bp = Blueprint('api', __name__, url_prefix='/api/v1')


def _payload():
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ValidationError('request body must be a JSON object')
    return data


def _kernel(data, key='kernel'):
    if key not in data:
        raise ValidationError(f'missing {key!r}')
    return kernel_from_dict(data[key])


def _number(data, key, kind, default):
    value = data.get(key, default)
    if value is None:
        return None
    try:
        return kind(value)
    except (TypeError, ValueError) as error:
        raise ValidationError(f'{key} must be a number') from error


@api_bp.route('/health', methods=['GET'])
def health():
    """Health check.

    Returns:
        JSON: Status and version
    """
    return jsonify({'status': 'ok', 'version': __version__})


@api_bp.route('/rho', methods=['POST'])
def api_rho():
    """Survival probabilities of the branching process.

    Returns:
        JSON: rho, rho_by_class, iterations, residual, converged, operator_norm
    """
    data = _payload()
    kappa = _kernel(data)
    solution = survival(kappa, tol=_number(data, 'tol', float, None))
    body = solution.to_dict()
    body['operator_norm'] = operator_norm(kappa)
    return jsonify(to_plain(body))


@api_bp.route('/rhok', methods=['POST'])
def api_rhok():
    """Finite-size probabilities rho_k for k = 1..k_max.

    Returns:
        JSON: One law per k
    """
    data = _payload()
    kappa = _kernel(data)
    k_max = _number(data, 'k_max', int, get_setting('SPECTRUM_K_MAX', 6))
    method = data.get('method', 'tree')
    if method == 'tree':
        laws = [rho_k_tree(kappa, k) for k in range(1, k_max + 1)]
    elif method == 'mc':
        samples = _number(data, 'samples', int, 10000)
        laws = rho_k_mc(kappa, k_max, samples, seed=_number(data, 'seed', int, 0))
    else:
        raise ValidationError(f'unknown method {method!r}')
    return jsonify(to_plain({'method': method, 'laws': [law.to_dict() for law in laws]}))


@api_bp.route('/dual', methods=['POST'])
def api_dual():
    """Dual measure and dual kernel.

    Returns:
        JSON: DualBundle plus ||T_kappa_tilde||
    """
    data = _payload()
    bundle = dualize(_kernel(data), tol=_number(data, 'tol', float, None))
    body = bundle.to_dict()
    body['dual_operator_norm'] = dual_subcritical_check(bundle)
    return jsonify(to_plain(body))


@api_bp.route('/cutnorm', methods=['POST'])
def api_cutnorm():
    """Cut norm of a kernel, or of kernel - minus.

    Returns:
        JSON: value, exact, witness
    """
    data = _payload()
    W = _kernel(data)
    if 'minus' in data:
        first, second = common_refinement(W, _kernel(data, 'minus'))
        W = first - second
    if data.get('exact', True):
        result = cut_norm_exact(W)
    else:
        result = cut_norm_heuristic(W, seed=_number(data, 'seed', int, 0))
    return jsonify(to_plain(result.to_dict()))


@api_bp.route('/cutdist', methods=['POST'])
def api_cutdist():
    """Cut distance between `kernel` and `other`.

    Returns:
        JSON: value, exact, witness permutation and signs
    """
    data = _payload()
    result = cut_distance(_kernel(data), _kernel(data, 'other'), seed=_number(data, 'seed', int, 0))
    return jsonify(to_plain(result.to_dict()))


@api_bp.route('/zeta', methods=['POST'])
def api_zeta():
    """Giant edge density zeta(kappa) with the full edge split.

    Returns:
        JSON: edges, zeta, edges_outside (all per vertex), rho
    """
    data = _payload()
    kappa = _kernel(data)
    solution = survival(kappa)
    edges, zeta_value, outside = edge_split(kappa, solution)
    return jsonify(to_plain({
        'rho': solution.rho,
        'edges': edges,
        'zeta': zeta_value,
        'edges_outside': outside
    }))
