from .types import PrimalDualPair, ValueSet, as_vector
from .expression import parse_expression, CompiledExpression
from .operator import Operator, FiniteGraph, Tabulated1D, Expression1D, evaluate_operator, sample_graph
from .builtin import Builtin, create_operator, register_operator, list_operators
from .sigma import SigmaSpec, ConstantSigma, TableSigma, ExpressionSigma, ExtendedSigma, sigma_value
