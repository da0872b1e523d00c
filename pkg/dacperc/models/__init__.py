from .dac import ClusterLabeling, DacSample, SpinConfig, color, dependence_range, label_clusters
