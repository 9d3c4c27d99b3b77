from mvsgrade.neuralnet.network import ActivationKind, NetworkStructure, \
    Network, NetworkShapeError, TrainingDivergedError, task_structure, \
    init_network, forward, gradients, backprop_step, zero_velocity, \
    classify, classify_batch, decode_output, mean_error
from mvsgrade.neuralnet.training import TrainingParams, TrainingHistory, \
    train, write_history
from mvsgrade.neuralnet.serialization import ModelFormatError, save_model, \
    load_model, model_to_dict, model_from_dict, dumps_model
