from mvsgrade.datasets.labels import TomatoStage, EggGrade, parse_label, \
    label_name, labels_for, output_size, target_vector, check_task
from mvsgrade.datasets.manifest import Manifest, ManifestRecord, \
    ManifestError, load_manifest, write_manifest
from mvsgrade.datasets.split import SplitSpec, InsufficientClassError, \
    stratified_split
from mvsgrade.datasets.synth import synth_generate, synth_grader_log, render
