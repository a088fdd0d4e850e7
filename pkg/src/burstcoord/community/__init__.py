from .graph import Partition, WeightedGraph
from .louvain import louvain, modularity
from .lpa import label_propagation
from .metrics import ari, contingency, nmi
