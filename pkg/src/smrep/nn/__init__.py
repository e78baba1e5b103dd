"""Minimal numpy neural-network engine with exact analytic gradients."""

from smrep.nn.checkpoint import load_checkpoint, read_tensor_file, save_checkpoint, write_tensor_file
from smrep.nn.gradcheck import GradCheckReport, gradient_check
from smrep.nn.layers import Activation, DenseLayer, dense_backward, dense_forward, relu_pattern
from smrep.nn.losses import mse_loss
from smrep.nn.lstm import LstmLayer, LstmStack, lstm_backward, lstm_forward
from smrep.nn.optim import AdamState, adam_step
from smrep.nn.parameters import InitKind, ParameterSpec, Parameters, init_parameters

__all__ = [
    "Activation",
    "AdamState",
    "DenseLayer",
    "GradCheckReport",
    "InitKind",
    "LstmLayer",
    "LstmStack",
    "ParameterSpec",
    "Parameters",
    "adam_step",
    "dense_backward",
    "dense_forward",
    "gradient_check",
    "init_parameters",
    "load_checkpoint",
    "lstm_backward",
    "lstm_forward",
    "mse_loss",
    "read_tensor_file",
    "relu_pattern",
    "save_checkpoint",
    "write_tensor_file",
]
