"""One implementation per CLI subcommand; each returns a JSON-serializable summary."""

from .evaluate import cmd_eval
from .gradcheck import cmd_gradcheck
from .grating import cmd_grating
from .heatmap import cmd_heatmap
from .predict import cmd_predict
from .probe import cmd_probe
from .synth import cmd_synth
from .train import cmd_train

COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "heatmap": cmd_heatmap,
    "grating": cmd_grating,
    "probe": cmd_probe,
    "gradcheck": cmd_gradcheck,
}

__all__ = [
    "COMMANDS",
    "cmd_eval",
    "cmd_gradcheck",
    "cmd_grating",
    "cmd_heatmap",
    "cmd_predict",
    "cmd_probe",
    "cmd_synth",
    "cmd_train",
]
