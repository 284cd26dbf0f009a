from .subtok import split_subtokens
from .vocab import (Vocabulary, build_vocabulary, node_label_units,
                    UNK, SLOT, END, UNKTYPE)
from .features import (NodeFeatures, encode_sample, initial_states,
                       type_representation, sample_type_subset)
