from mvsgrade.features.spectral import SpectralPattern, bin_index, \
    extract_spectral_pattern
from mvsgrade.features.featurefile import FeatureSet, write_feature_file, \
    read_feature_file
