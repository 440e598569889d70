from .loader import load_config
from .models import ExperimentConfig
from .presets import PRESETS
