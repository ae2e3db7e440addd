"""Embedding + LSTM/BiLSTM/CNN + dense classifiers with hand-written backward passes."""

from .layers import (ConvParams, LstmParams, bilstm_backward, bilstm_forward,
                     conv_pool_backward, conv_pool_forward, dense_backward, dense_forward,
                     dropout_apply, embed_backward, embed_forward, lstm_backward, lstm_forward)
from .losses import loss_bce_logits, loss_cross_entropy, loss_mse
from .model import (ARCHS, EarlyStopping, Network, TrainConfig, TrainHistory, default_epochs,
                    init_network, neural_predict, predict_labels, predict_proba, train_model)
from .optim import AdamState, adam_step, sgd_step

__all__ = [
    "ARCHS", "AdamState", "ConvParams", "EarlyStopping", "LstmParams", "Network",
    "TrainConfig", "TrainHistory", "adam_step", "bilstm_backward", "bilstm_forward",
    "conv_pool_backward", "conv_pool_forward", "default_epochs", "dense_backward",
    "dense_forward", "dropout_apply", "embed_backward", "embed_forward", "init_network",
    "loss_bce_logits", "loss_cross_entropy", "loss_mse", "lstm_backward", "lstm_forward",
    "neural_predict", "predict_labels", "predict_proba", "sgd_step", "train_model",
]
