"""Small and minimal witnessing subsystems and Farkas certificates for
reachability thresholds in DTMCs and MDPs."""

__version__ = "0.1.0"
