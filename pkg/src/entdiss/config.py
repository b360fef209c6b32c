from dataclasses import dataclass, field, fields
from io import StringIO
from typing import IO, List, Self

import yaml

from .util import UserError


class YAMLObject(yaml.YAMLObject):

    # Override to_yaml to customize the yaml representation.
    #   * Order of fields is as declared in the dataclass.
    #   * None values are skipped; zeros and empty strings are kept.
    @classmethod
    def to_yaml(cls, dumper: yaml.Dumper, data: Self):
        def i():
            for f in fields(cls):  # type: ignore
                value = getattr(data, f.name)
                if value is None:
                    continue
                yield (dumper.represent_data(f.name), dumper.represent_data(value))

        return yaml.MappingNode(cls.yaml_tag, list(i()))


class Loader(yaml.SafeLoader):

    # Construct objects with the dataclass constructor, so that defaults are
    # respected and unknown fields raise.
    def construct_yaml_object(self, node, cls):
        state = self.construct_mapping(node, deep=True)
        try:
            return cls(**state)  # type: ignore
        except TypeError as e:
            raise UserError(f"Error: bad run configuration: {e}") from e


yaml.add_path_resolver("!RunConfig", [], Loader=Loader)


@dataclass
class RunConfig(YAMLObject):
    """
    Settings of one CLI run.  Fields left as None fall back to the
    command's defaults.
    """

    yaml_tag = "!RunConfig"
    yaml_loader = Loader
    command: str | None = field(default=None)
    n: int | None = field(default=None)
    state: str | None = field(default=None)
    noise: str | None = field(default=None)
    classes: List[str] | None = field(default=None)
    resolution: float | None = field(default=None)
    seed: int | None = field(default=None)
    threads: int | None = field(default=None)
    format: str | None = field(default=None)
    out: str | None = field(default=None)
    cert_dir: str | None = field(default=None)
    solver: str | None = field(default=None)

    def merged(self, other: "RunConfig") -> "RunConfig":
        "self, with every field `other` sets taking precedence"
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        for f in fields(other):
            value = getattr(other, f.name)
            if value is not None:
                values[f.name] = value
        return RunConfig(**values)

    def dump(self, f: IO):
        yaml.dump(self, f)

    def dumps(self) -> str:
        with StringIO() as f:
            yaml.dump(self, f)
            return f.getvalue()

    @classmethod
    def load(cls, f: IO) -> Self:
        try:
            config = yaml.load(f, Loader=Loader)
        except yaml.YAMLError as e:
            raise UserError(f"Error: bad run configuration: {e}") from e
        if config is None:
            return cls()
        if not isinstance(config, cls):
            raise UserError("Error: run configuration must be a mapping")
        return config

    @classmethod
    def loads(cls, s: str) -> Self:
        with StringIO(s) as f:
            return cls.load(f)
