from . import tensor
from .tensor import Tensor, ShapeError, constant, zeros
from .params import ParamStore
from .gru import make_gru, gru_cell, gru_cell_masked
from .optim import Adam
from .gradcheck import gradient_check
