from .audio_io import (
    AudioBuffer,
    GainAugmentConfig,
    WavInfo,
    augment_gain,
    apply_gain,
    downmix_mono,
    read_wav,
    read_wav_header,
    resample,
    standardize,
    write_wav,
)
from .text_norm import TokenTable, normalize_transcript, split_words, tokenize_word, load_token_table
from .emissions import EmissionMatrix, read_emissions, write_emissions
from .ctc_align import WordAlignment, build_extended_sequence, collapse_to_words, force_align, viterbi_align
from .chunker import Chunk, VadConfig, chunk_words, detect_speech, extract_chunk_audio
from .diar_formats import DiarAnnotation, DiarSegment, parse_csv, parse_rttm, to_rttm, window_annotation
from .metrics import DerReport, WerReport, der, der_corpus, wer, wer_corpus
from .manifest import ManifestReport, scan_dataset
from .config import PipelineConfig, load_config
from .env import Env, ensure_env

__all__ = [
    "AudioBuffer",
    "GainAugmentConfig",
    "WavInfo",
    "augment_gain",
    "apply_gain",
    "downmix_mono",
    "read_wav",
    "read_wav_header",
    "resample",
    "standardize",
    "write_wav",
    "TokenTable",
    "normalize_transcript",
    "split_words",
    "tokenize_word",
    "load_token_table",
    "EmissionMatrix",
    "read_emissions",
    "write_emissions",
    "WordAlignment",
    "build_extended_sequence",
    "collapse_to_words",
    "force_align",
    "viterbi_align",
    "Chunk",
    "VadConfig",
    "chunk_words",
    "detect_speech",
    "extract_chunk_audio",
    "DiarAnnotation",
    "DiarSegment",
    "parse_csv",
    "parse_rttm",
    "to_rttm",
    "window_annotation",
    "DerReport",
    "WerReport",
    "der",
    "der_corpus",
    "wer",
    "wer_corpus",
    "ManifestReport",
    "scan_dataset",
    "PipelineConfig",
    "load_config",
    "Env",
    "ensure_env",
]
