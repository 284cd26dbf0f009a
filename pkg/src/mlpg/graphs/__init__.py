from .edges import (EDGE_TYPES, FORWARD_EDGE_TYPES, EDGE_MASKS,
                    UnknownEdgeType, canonical, dual, expand_mask)
from .build import (GraphNode, ProgramGraph, FileAnalysis,
                    build_file_analysis, add_backward_edges)
from .surgery import (TaskSample, Candidate, SlotRejected, SLOT_LABEL,
                      make_varmisuse_sample, make_varnaming_sample)
from .serialize import (sample_to_dict, sample_from_dict, graph_to_dict,
                        graph_from_dict, save_sample, load_sample)
