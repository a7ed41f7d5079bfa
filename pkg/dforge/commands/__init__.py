"""Command routing.

Each command module exposes a `router`; handlers take the validated job and
the run context and return an Outcome. `main` includes every router.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from pydantic import BaseModel

from dforge.exceptions import ParseError
from dforge.schemas import JobSpec


@dataclass(frozen=True)
class RunContext:
    threads: Optional[int] = None
    deterministic: bool = False


@dataclass
class Outcome:
    """Result rows of a command; certified=False marks a negative verdict"""
    results: List[BaseModel]
    audit: dict = field(default_factory=dict)
    certified: Optional[bool] = None


Handler = Callable[[JobSpec, RunContext], Outcome]


class CommandRouter:
    def __init__(self):
        self.routes: Dict[str, Handler] = {}

    def command(self, name: str):
        """Register the decorated function as the handler of `name`"""
        def register(handler: Handler) -> Handler:
            if name in self.routes:
                raise ValueError(f"command '{name}' is already routed")
            self.routes[name] = handler
            return handler

        return register

    def include_router(self, router: "CommandRouter") -> None:
        for name, handler in router.routes.items():
            self.command(name)(handler)

    def dispatch(self, job: JobSpec, context: RunContext) -> Outcome:
        handler = self.routes.get(job.command)
        if handler is None:
            raise ParseError(f"no handler for command '{job.command}'", field="command")
        return handler(job, context)
