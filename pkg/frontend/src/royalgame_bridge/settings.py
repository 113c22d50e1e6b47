"""Generation and tuning settings with the published defaults."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional


@dataclass(frozen=True)
class GenerationSettings:
    """Decoding parameters; defaults are the evaluated configuration."""

    beams: int = 2
    repetition_penalty: float = 1.3
    sampling: bool = False
    temperature: float = 1.0
    early_stopping: bool = True
    max_generation_seconds: float = 10.0
    length_penalty: float = 0.4
    # Operational cap, not part of the published configuration: a move is a
    # handful of tokens, so there is no reason to decode until the time
    # budget runs out on every request.
    max_new_tokens: int = 16

    def to_generation_kwargs(
        self,
        temperature: Optional[float] = None,
        sample: Optional[bool] = None,
    ) -> Dict:
        """Build `model.generate` kwargs, honoring per-request overrides.

        Temperature is only forwarded when sampling is on; beam search
        ignores it and recent transformers warn about unused knobs.
        """
        do_sample = self.sampling if sample is None else bool(sample)
        kwargs = {
            "num_beams": self.beams,
            "repetition_penalty": self.repetition_penalty,
            "do_sample": do_sample,
            "early_stopping": self.early_stopping,
            "max_time": self.max_generation_seconds,
            "length_penalty": self.length_penalty,
            "min_new_tokens": 1,
            "max_new_tokens": self.max_new_tokens,
        }
        if do_sample:
            kwargs["temperature"] = float(
                self.temperature if temperature is None else temperature
            )
        return kwargs


@dataclass(frozen=True)
class TuningSettings:
    """Fine-tuning hyperparameters; defaults are the published run."""

    learning_rate: float = 2e-4
    batch_size: int = 4
    epochs: int = 3
    seed: int = 41
    data_path: str = ""

    def to_manifest(self) -> Dict:
        return {
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "seed": self.seed,
        }
