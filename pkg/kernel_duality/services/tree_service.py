"""Unlabeled trees with automorphism counts.

Yeh module k vertices wale saare unlabeled trees deta hai, har ek ke
automorphism count ke saath. Tree-sum formulas (rho_k) isi par chalte hain.

"""

import logging
from functools import lru_cache

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from kernel_duality.errors import CapacityError, ValidationError
from kernel_duality.models.results import TreeShape
from kernel_duality.utils import get_setting


logger = logging.getLogger(__name__)


def _rooted_code(tree, root):
    """AHU encoding of `tree` rooted at `root`."""
    def encode(vertex, parent):
        children = sorted(encode(child, vertex) for child in tree[vertex] if child != parent)
        return '(' + ''.join(children) + ')'
    return encode(root, None)


def canonical_form(tree):
    """Minimum rooted encoding over all rootings; equal iff trees are isomorphic."""
    return min(_rooted_code(tree, root) for root in tree.nodes)


def _canonical_labeling(tree):
    """Relabel vertices in BFS order from the root of the minimum encoding."""
    root = min(tree.nodes, key=lambda vertex: (_rooted_code(tree, vertex), vertex))
    codes = {}

    def encode(vertex, parent):
        code = '(' + ''.join(sorted(encode(c, vertex) for c in tree[vertex] if c != parent)) + ')'
        codes[(vertex, parent)] = code
        return code

    encode(root, None)
    order = [root]
    parents = {root: None}
    position = 0
    while position < len(order):
        vertex = order[position]
        children = [c for c in tree[vertex] if c != parents[vertex]]
        children.sort(key=lambda c: codes[(c, vertex)])
        for child in children:
            parents[child] = vertex
            order.append(child)
        position += 1
    mapping = {vertex: index for index, vertex in enumerate(order)}
    edges = sorted(tuple(sorted((mapping[u], mapping[v]))) for u, v in tree.edges)
    return tuple(edges)


def automorphism_count(tree):
    """Number of automorphisms of a graph."""
    return sum(1 for _ in GraphMatcher(tree, tree).isomorphisms_iter())


@lru_cache(maxsize=None)
def enumerate_trees(k):
    """All unlabeled trees on k vertices.

    Args:
        k (int): Vertex count, 1 <= k <= TREE_MAX_K

    Returns:
        tuple: TreeShape objects sorted by canonical form

    Example:
        >>> [shape.aut for shape in enumerate_trees(4)]  # doctest: +SKIP
        [6, 2]
    """
    cap = get_setting('TREE_MAX_K', 8)
    if k < 1:
        raise ValidationError('trees need at least one vertex')
    if k > cap:
        raise CapacityError(f'tree enumeration is capped at k={cap}')

    if k == 1:
        trees = [nx.empty_graph(1)]
    elif k == 2:
        trees = [nx.path_graph(2)]
    else:
        trees = list(nx.nonisomorphic_trees(k))

    shapes = []
    for tree in trees:
        shapes.append(TreeShape(
            k=k,
            edges=_canonical_labeling(tree),
            aut=automorphism_count(tree),
            canonical=canonical_form(tree)
        ))
    shapes.sort(key=lambda shape: shape.canonical)
    logger.debug(f'enumerate_trees({k}): {len(shapes)} shapes')
    return tuple(shapes)


def is_tree(shape):
    """True iff the shape's edges form a tree on its k vertices."""
    graph = nx.Graph()
    graph.add_nodes_from(range(shape.k))
    graph.add_edges_from(shape.edges)
    return graph.number_of_edges() == shape.k - 1 and nx.is_connected(graph)
