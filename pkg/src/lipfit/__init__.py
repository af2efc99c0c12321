"""Regularized empirical risk minimization with Lipschitz losses.

Nuclear-norm-penalized matrix completion under hinge/logistic/quantile/
squared losses (ADMM), l1- and sorted-l1-penalized logistic regression
(accelerated proximal gradient), closed-form rate and penalty-level
formulas, cross-validation, and a simulation harness.
"""

from .losses import BernsteinConstants, LossKind, bernstein_constants, loss_subgradient, loss_value, scalar_prox
from .matrix_admm import (AdmmConfig, GaussianInit, MatrixProblem, ObservationSet,
                          SolverReport, WarmStart, admm_m_step, admm_solve, objective)
from .prox_ops import (SlopeWeights, l1_norm, nuclear_norm, project_l2_ball,
                       slope_norm, slope_prox, slope_weights, soft_threshold, svt)
from .simulation import (GaussianNoise, LogisticNoise, Noiseless, QuantileScenarioSpec,
                         ScenarioSpec, StudentTNoise, SwitchNoise, gen_classification,
                         gen_quantile, l1_reconstruction, mae, misclassification_rate, mse)
from .vector_solver import (FistaConfig, L1Penalty, SlopePenalty, VectorProblem,
                            empirical_risk_and_gradient, prox_grad_solve)
from .cv import CvResult, default_lambda_grid, kfold_cv

__all__ = [
    "AdmmConfig", "BernsteinConstants", "CvResult", "FistaConfig", "GaussianInit",
    "GaussianNoise", "L1Penalty", "LogisticNoise", "LossKind", "MatrixProblem",
    "Noiseless", "ObservationSet", "QuantileScenarioSpec", "ScenarioSpec",
    "SlopePenalty", "SlopeWeights", "SolverReport", "StudentTNoise", "SwitchNoise",
    "VectorProblem", "WarmStart", "admm_m_step", "admm_solve", "bernstein_constants",
    "default_lambda_grid", "empirical_risk_and_gradient", "gen_classification",
    "gen_quantile", "kfold_cv", "l1_norm", "l1_reconstruction", "loss_subgradient",
    "loss_value", "mae", "misclassification_rate", "mse", "nuclear_norm",
    "objective", "project_l2_ball", "prox_grad_solve", "scalar_prox", "slope_norm",
    "slope_prox", "slope_weights", "soft_threshold", "svt",
]

__version__ = "0.1.0"
