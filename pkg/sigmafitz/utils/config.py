# --------------------------------------------------------
# sigmafitz
# Fitzpatrick functions of sigma-monotone operators
# --------------------------------------------------------

import os
import yaml
from yacs.config import CfgNode as CN

_C = CN()

# Base config files
_C.BASE = ['']

# -----------------------------------------------------------------------------
# Operator settings
# -----------------------------------------------------------------------------
_C.OPERATOR = CN()
# Number of sub-intervals m used to discretize the unit interval image [0, 1]
_C.OPERATOR.UNIT_INTERVAL_RESOLUTION = 16

# -----------------------------------------------------------------------------
# Windowed supremum settings
# -----------------------------------------------------------------------------
_C.WINDOW = CN()
# Window radii R_k, must be strictly increasing
_C.WINDOW.RADII = [float(2 ** k) for k in range(13)]
# Uniform grid points per window
_C.WINDOW.SAMPLES = 4097
# Minimal sup increment, relative to R_k, counted as growth
_C.WINDOW.GROWTH_THRESHOLD = 0.1
# Relative agreement of the last three windows for a stabilized value
_C.WINDOW.TOL = 1e-9

# -----------------------------------------------------------------------------
# Inequality check settings
# -----------------------------------------------------------------------------
_C.CHECK = CN()
# Absolute slack for sigma-monotonicity, relatedness and Fitzpatrick inequalities
_C.CHECK.TOL = 1e-9
# Slack of the extension monotonicity comparison
_C.CHECK.EXTENSION_TOL = 1e-12
# Slack of the sup/inf identity
_C.CHECK.IDENTITY_TOL = 1e-9
# Rows per block in pairwise scans
_C.CHECK.CHUNK_ROWS = 512

# -----------------------------------------------------------------------------
# Resolvent solver settings
# -----------------------------------------------------------------------------
_C.SOLVER = CN()
# Coarse scan covers [-SCAN_RANGE, SCAN_RANGE]
_C.SOLVER.SCAN_RANGE = 64.0
_C.SOLVER.SCAN_POINTS = 2 ** 16 + 1
# Residual |x + x* - z| accepted as a solution
_C.SOLVER.TOL = 1e-8
_C.SOLVER.MAX_REFINE_ITERS = 200
# Sampled graph used by relatedness preconditions
_C.SOLVER.GRAPH_RANGE = 4.0
_C.SOLVER.GRAPH_POINTS = 801

# -----------------------------------------------------------------------------
# Quadratic minorant search settings
# -----------------------------------------------------------------------------
_C.MINORANT = CN()
# Search box is [-BOX, BOX] in every coordinate of (x, x*)
_C.MINORANT.BOX = 4.0
# Grid points per coordinate of the initial search
_C.MINORANT.STEPS = 41
# Number of step halvings of the local refinement
_C.MINORANT.REFINE_STEPS = 30
# Random points used to verify the minorant inequality
_C.MINORANT.VERIFY_SAMPLES = 1000
_C.MINORANT.TOL = 1e-6

# -----------------------------------------------------------------------------
# Example reproduction settings
# -----------------------------------------------------------------------------
_C.REPRODUCE = CN()
# Allowed |sampled - closed form| at finite probes
_C.REPRODUCE.TOL = 1e-4

# -----------------------------------------------------------------------------
# Misc
# -----------------------------------------------------------------------------
# Path to log folder, no log file is written when empty
_C.OUTPUT = ''
# Fixed random seed for randomized checks
_C.SEED = 0
_C.LOG_LEVEL = 'INFO'


def _update_config_from_file(config, cfg_file):
    config.defrost()
    with open(cfg_file, 'r') as f:
        yaml_cfg = yaml.load(f, Loader=yaml.FullLoader) or {}

    for cfg in yaml_cfg.setdefault('BASE', ['']):
        if cfg:
            _update_config_from_file(
                config, os.path.join(os.path.dirname(cfg_file), cfg)
            )
    config.merge_from_file(cfg_file)
    config.freeze()


def update_config(config, args):
    def _check_args(name):
        return getattr(args, name, None) is not None

    if _check_args('cfg') and args.cfg:
        _update_config_from_file(config, args.cfg)

    config.defrost()
    # merge from specific arguments
    if _check_args('tol'):
        config.CHECK.TOL = args.tol
    if _check_args('window_radii'):
        config.WINDOW.RADII = [float(r) for r in args.window_radii]
    if _check_args('samples'):
        config.WINDOW.SAMPLES = args.samples
    if _check_args('resolution'):
        config.OPERATOR.UNIT_INTERVAL_RESOLUTION = args.resolution
    if _check_args('solver_tol'):
        config.SOLVER.TOL = args.solver_tol
    if _check_args('scan_range'):
        config.SOLVER.SCAN_RANGE = args.scan_range
    if _check_args('seed'):
        config.SEED = args.seed
    if _check_args('log_dir'):
        config.OUTPUT = args.log_dir
    if _check_args('log_level'):
        config.LOG_LEVEL = args.log_level
    if _check_args('opts') and args.opts:
        config.merge_from_list(args.opts)

    config.freeze()


def get_config(args=None):
    """Get a yacs CfgNode object with default values."""
    # Return a clone so that the defaults will not be altered
    config = _C.clone()
    if args is not None:
        update_config(config, args)
    else:
        config.freeze()

    return config
