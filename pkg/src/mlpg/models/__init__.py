from .base import ModelBase, Prediction, DivergenceError
from .decoder import (make_decoder_params, naming_loss, greedy_decode,
                      MAX_NAME_LENGTH)
from .sequence import bigru_run, make_bigru_params, BiGruStates
from .ggnn_models import GgnnVarMisuse, GgnnVarNaming, softmax
from .baselines import (LocVarMisuse, AvgBiRnnVarMisuse, AvgBiRnnVarNaming,
                        AvgLblVarNaming, DEFAULT_WINDOW, LBL_CONTEXT,
                        label_mean_embeddings)

MODEL_REGISTRY = {
    ("misuse", "ggnn"): GgnnVarMisuse,
    ("misuse", "loc"): LocVarMisuse,
    ("misuse", "avgbirnn"): AvgBiRnnVarMisuse,
    ("naming", "ggnn"): GgnnVarNaming,
    ("naming", "avgbirnn"): AvgBiRnnVarNaming,
    ("naming", "avglbl"): AvgLblVarNaming,
}


def make_model(task, model, **kwargs):
    key = (task, model)
    if key not in MODEL_REGISTRY:
        raise ValueError(f"no model '{model}' for task '{task}'")
    return MODEL_REGISTRY[key](**kwargs)
