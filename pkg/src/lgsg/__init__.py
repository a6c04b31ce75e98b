"""Graph generation from a single input graph.

Pipeline: learn node embeddings, sample random-walk subgraphs, train a
continuous diffusion model over (embedding, adjacency) blocks, generate
synthetic subgraphs, and assemble them into an output graph of any target
size. Ships with fitted classical baselines and a benchmark harness.
"""

from .assembly import AssembledGraph, AssemblyInput, node_aggregation, threshold_matching
from .baselines import (
    KronFitConfig,
    KroneckerInitiator,
    barabasi_albert,
    erdos_renyi,
    kronecker_generate,
    kronfit,
)
from .bench import BenchmarkRecord, Harness, RunConfig, load_config, run_benchmark, run_pipeline
from .denoiser import Denoiser, init_denoiser, load_denoiser, save_denoiser
from .diffusion import (
    DiffusionConfig,
    GeneratedSubgraph,
    NoisedSample,
    denoise_estimate,
    forward_noise,
    posterior_step,
    predict_noise,
    sample_subgraphs,
    train_diffusion,
)
from .dsu import DisjointSetUnion
from .embedding import (
    ContextBatch,
    EmbedConfig,
    EmbeddingMatrix,
    SageParams,
    sage_forward,
    sage_loss,
    sample_context_pairs,
    train_embeddings,
)
from .graph import Graph, disjoint_union, induced_subgraph, load_edge_list, save_edge_list
from .metrics import (
    MetricsReport,
    assortativity,
    average_degree,
    avg_clustering,
    compute_report,
    edge_distribution_entropy,
    gini,
    relative_distance,
)
from .sampling import SubgraphSample, build_subgraph_dataset, random_walk
from .schedule import NoiseSchedule, make_schedule

__version__ = "0.1.0"
