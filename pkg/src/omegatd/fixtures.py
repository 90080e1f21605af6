"""Access to the presentation fixtures shipped with the package."""

from importlib import resources

from .omega import OmegaPresentation, validate_presentation

FIXTURE_NAMES = ("ray", "ladder", "domray", "fan2", "twotail", "fantail",
                 "appendixA")


def fixture_text(name: str) -> str:
    path = resources.files("omegatd") / "fixtures" / f"{name}.og"
    return path.read_text(encoding="utf-8")


def load_fixture(name: str) -> OmegaPresentation:
    return validate_presentation(fixture_text(name))
