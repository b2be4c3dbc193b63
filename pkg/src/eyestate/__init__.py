"""EEG eye-state data reduction: ingest, preprocessing, channel graphs,
mRMR channel selection, transition epochs and classifier benchmarks."""

from .connectivity import (ChannelGraph, CorrMatrix, adjacency, average_degree,
                           cluster_order, correlation_matrix, export_graph, import_graph)
from .datasets import UCI_CHANNELS, find_uci_dataset, make_synthetic_recording
from .epochs import EpochSet, find_transitions, slice_windows, window_bounds
from .exceptions import (ConvergenceWarning, DataError, DegenerateInputWarning,
                         EyeStateError)
from .ingest import load_recording, parse_arff, parse_csv, summarize, write_csv
from .learners import (KNNClassifier, LogisticClassifier, RandomForest, RBFSVC,
                       grid_search, make_classifier, model_from_json, model_to_json)
from .preprocess import ChannelCenterer, OutlierReport, center, remove_outliers
from .recording import ChannelSeries, Recording
from .scoring import FoldPlan, f1_score, make_folds
from .selection import (AggregateRanking, HistogramConfig, MRMRSelector, SelectionRanking,
                        average_ranking, entropy, mrmr_rank, mutual_information)

__version__ = "0.1.0"
