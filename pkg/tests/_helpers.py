import numpy as np

from rwsqaoa.graphs import Graph


def random_graph(rng: np.random.Generator, n: int, p: float = 0.4) -> Graph:
    iu = np.triu_indices(n, 1)
    keep = rng.random(len(iu[0])) < p
    return Graph(n, np.c_[iu[0][keep], iu[1][keep]])
