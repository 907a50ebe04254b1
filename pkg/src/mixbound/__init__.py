"""Eta-mixing coefficients, contraction bounds and concentration envelopes for
Markov chains, chain random fields, Markov trees and Markov marginal processes,
with an exhaustive-enumeration oracle and a Monte Carlo harness."""

from .chain import (ChainSpec, chain_density, chain_eta_bound, chain_eta_exact, chain_marginals,
                    chain_theta, theta_product)
from .contraction import (BlockKernel, alpha, block_tensor, contract, doeblin_coefficient,
                          product_tv_bound)
from .core import (Alphabet, CapExceededError, HammingConfig, SpecError, StochasticityError,
                   as_probvec, check_kernel, hamming_distance, is_balanced, lipschitz_constant,
                   tv_norm)
from .harness import SampleRun, TailReport, sample, verify_envelope
from .mixing import (ENVELOPES, EnvelopeTable, EtaMatrix, MixingMatrices, build_matrices,
                     delta_inf_norm, envelope_kontram, envelope_marton, envelope_mcdiarmid,
                     envelope_samson, envelope_table, gamma_2_norm)
from .mmp import MmpSpec, mmp_density, mmp_eta_bound, mmp_h_vector, mmp_marginals, mmp_theta
from .oracle import JointTable, conditional_law, enumerate_joint, exact_eta, exact_eta_matrix
from .process import eta_bound, local_thetas, marginals
from .report import analyze, dumps
from .specio import load_spec, parse_spec, spec_to_document
from .tree import (LevelDecomposition, TreeSpec, TreeTopology, analyze_topology,
                   canonical_renumbering, j_zero, linear_growth_eta_bound, simple_tree_bound,
                   theta_tilde, tree_delta_bound, tree_density, tree_eta_bound_levels,
                   tree_eta_bound_simple, tree_linear_growth_bound, tree_theta)
from .undirected import (UndirectedChainSpec, derive_kernels, field_density, partition_function,
                         potential_ratio_bound, reweighted_tv, undirected_theta_bound)

__version__ = "0.1.0"

__all__ = ['alpha', 'Alphabet', 'analyze', 'analyze_topology', 'as_probvec', 'block_tensor',
           'BlockKernel', 'build_matrices', 'canonical_renumbering', 'CapExceededError',
           'chain_density', 'chain_eta_bound', 'chain_eta_exact', 'chain_marginals', 'chain_theta',
           'ChainSpec', 'check_kernel', 'conditional_law', 'contract', 'delta_inf_norm',
           'derive_kernels', 'doeblin_coefficient', 'dumps', 'enumerate_joint', 'envelope_kontram',
           'envelope_marton', 'envelope_mcdiarmid', 'envelope_samson', 'envelope_table',
           'ENVELOPES', 'EnvelopeTable', 'eta_bound', 'EtaMatrix', 'exact_eta', 'exact_eta_matrix',
           'field_density', 'gamma_2_norm', 'hamming_distance', 'HammingConfig', 'is_balanced',
           'j_zero', 'JointTable', 'LevelDecomposition', 'linear_growth_eta_bound',
           'lipschitz_constant', 'load_spec', 'local_thetas', 'marginals', 'MixingMatrices',
           'mmp_density', 'mmp_eta_bound', 'mmp_h_vector', 'mmp_marginals', 'mmp_theta', 'MmpSpec',
           'parse_spec', 'partition_function', 'potential_ratio_bound', 'product_tv_bound',
           'reweighted_tv', 'sample', 'SampleRun', 'simple_tree_bound', 'spec_to_document',
           'SpecError', 'StochasticityError', 'TailReport', 'theta_product', 'theta_tilde',
           'tree_delta_bound', 'tree_density', 'tree_eta_bound_levels', 'tree_eta_bound_simple',
           'tree_linear_growth_bound', 'tree_theta', 'TreeSpec', 'TreeTopology', 'tv_norm',
           'undirected_theta_bound', 'UndirectedChainSpec', 'verify_envelope']
