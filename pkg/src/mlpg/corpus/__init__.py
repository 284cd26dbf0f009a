from .generator import (CorpusConfig, GenerationError, generate_corpus,
                        write_corpus, NAME_POOLS, TEMPLATES)
from .extract import (FileSamples, analyze_file, extract_file, extract_corpus,
                      candidate_count_stats)
from .split import SplitManifest, LeakageError, split_corpus, SPLIT_NAMES
