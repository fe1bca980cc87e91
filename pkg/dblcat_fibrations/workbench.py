"""
Command orchestration
Loads instances, runs one module operation per command and turns outcomes
and errors into (exit code, report) pairs
"""

import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from .config import Settings, load_settings, use_settings
from .constants import (
    EXIT_IO_ERROR,
    EXIT_MATH_FAILURE,
    EXIT_OK,
    EXIT_RESOURCE_CAP,
    FIBRATION_KINDS,
    __version__,
)
from .core_cat import ValidationReport, validate_category, validate_functor
from .corpus import generate_corpus, write_corpus
from .dblcat import validate_double, validate_double_functor, validate_marking
from .diagrams import export_dot
from .errors import (
    CellNotFound,
    CleavageError,
    DblcatError,
    InvalidStructureError,
    LiftUniquenessError,
    NotCertifiedError,
    ResourceLimitExceeded,
    SchemaError,
)
from .fibr import check_fibration
from .bisimp import compare_kernels
from .groth import straighten_1, unstraighten_1, validate_cat_valued
from .reflect import REFLECTIONS, roundtrip_iso
from .serialization import Instance, load_instance, make_instance, save_instance
from .two_cat import (
    is_1cocartesian_fibration,
    straighten_2,
    unstraighten_2,
    validate_two_cat_valued,
    validate_two_category,
    validate_two_functor,
)

logger = logging.getLogger(__name__)

Outcome = Tuple[int, Dict[str, Any]]

_MATH_ERRORS = (NotCertifiedError, LiftUniquenessError, CleavageError, InvalidStructureError, CellNotFound)

VALIDATORS: Dict[str, Callable[[Any], ValidationReport]] = {
    "category": validate_category,
    "double": validate_double,
    "marked-double": validate_marking,
    "functor": validate_functor,
    "double-functor": validate_double_functor,
    "two-category": validate_two_category,
    "two-functor": validate_two_functor,
    "cat-valued-functor": validate_cat_valued,
    "two-cat-valued-functor": validate_two_cat_valued,
}


def _error_witness(error: DblcatError) -> Optional[List[str]]:
    for attribute in ("witness", "problem", "cell"):
        value = getattr(error, attribute, None)
        if value is not None:
            return [repr(value)]
    failures = getattr(error, "failures", None)
    if failures:
        return [repr(failures[0])]
    report = getattr(error, "report", None)
    if report is not None and report.violations:
        return [report.violations[0].law] + [repr(w) for w in report.violations[0].witness]
    return None


class FibrationWorkbench:
    """Runs the fibration commands on instance files under one set of settings"""

    def __init__(self, settings: Optional[Settings] = None):
        """
        Args:
            settings (Settings): validated settings (default: environment)
        """
        self.settings = settings or load_settings()
        use_settings(self.settings)

    def get_info(self) -> Dict[str, Any]:
        return {
            'version': __version__,
            'settings': self.settings.model_dump(),
            'fibration_kinds': list(FIBRATION_KINDS),
            'reflections': sorted(REFLECTIONS),
            'instance_kinds': sorted(VALIDATORS),
        }

    def run(self, command: str, **kwargs: Any) -> Outcome:
        """
        Run cmd_<command> and map errors to exit codes: mathematical failures
        to 1, schema and I/O problems to 2, enumeration caps to 3
        """
        handler = getattr(self, f"cmd_{command.replace('-', '_')}", None)
        if handler is None:
            raise ValueError(f"unknown command {command!r}")
        try:
            return handler(**kwargs)
        except ResourceLimitExceeded as error:
            logger.error("%s: %s", command, error)
            return EXIT_RESOURCE_CAP, {'command': command, 'ok': False, 'error': str(error),
                                       'limit': error.limit}
        except SchemaError as error:
            logger.error("%s: %s", command, error)
            return EXIT_IO_ERROR, {'command': command, 'ok': False, 'error': str(error)}
        except OSError as error:
            logger.error("%s: %s", command, error)
            return EXIT_IO_ERROR, {'command': command, 'ok': False, 'error': str(error)}
        except _MATH_ERRORS as error:
            logger.warning("%s: %s", command, error)
            return EXIT_MATH_FAILURE, {'command': command, 'ok': False, 'error': str(error),
                                       'error_type': type(error).__name__, 'witness': _error_witness(error)}
        except ValueError:
            raise
        except Exception as error:
            logger.exception("%s: internal error", command)
            return EXIT_MATH_FAILURE, {'command': command, 'ok': False, 'error': str(error),
                                       'error_type': type(error).__name__, 'internal': True}

    def run_batch(self, command: str, paths: Sequence[str], **kwargs: Any) -> Outcome:
        """Run one command per path; reports are merged by instance name and the worst exit code wins"""
        results = []
        code = EXIT_OK
        for path in tqdm(paths, desc=command, dynamic_ncols=True, disable=not sys.stderr.isatty()):
            status, report = self.run(command, path=path, **kwargs)
            report.setdefault('instance', Path(path).stem)
            report['exit_code'] = status
            results.append(report)
            code = max(code, status)
        results.sort(key=lambda r: str(r.get('instance')))
        return code, {'command': command, 'ok': code == EXIT_OK, 'results': results}

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _load(path: str, *kinds: str) -> Instance:
        instance = load_instance(path)
        if kinds and instance.kind not in kinds:
            raise SchemaError(f"{path}: expected {' or '.join(kinds)}, found {instance.kind}")
        return instance

    @staticmethod
    def _report(command: str, instance: Instance, ok: bool, **fields: Any) -> Outcome:
        report = {'command': command, 'instance': instance.name, 'kind': instance.kind, 'ok': ok}
        report.update(fields)
        return (EXIT_OK if ok else EXIT_MATH_FAILURE), report

    def _write(self, out: Optional[str], name: str, value: Any, **metadata: Any) -> Optional[str]:
        if out is None:
            return None
        target = Path(out)
        if out.endswith(("/", "\\")) or target.is_dir():
            target = target / f"{name}.json"
        return str(save_instance(make_instance(name, value, **metadata), target))

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def cmd_validate(self, path: str) -> Outcome:
        instance = self._load(path)
        try:
            report = VALIDATORS[instance.kind](instance.value)
        except KeyError as error:
            raise SchemaError(f"{path}: table refers to an undeclared cell {error}") from error
        return self._report("validate", instance, report.ok, validation=report.to_dict())

    def cmd_fibcheck(self, path: str, kind: str = "left-cart") -> Outcome:
        """Certify a double functor for one of the eight kinds, or a 2-functor as 1-cocartesian"""
        instance = self._load(path, "double-functor", "two-functor")
        if instance.kind == "two-functor":
            certificate = is_1cocartesian_fibration(instance.value, self.settings.mode)
        else:
            if kind not in FIBRATION_KINDS:
                raise ValueError(f"unknown fibration kind {kind!r}")
            certificate = check_fibration(instance.value, kind, self.settings.paranoid, self.settings.max_cells)
        return self._report("fibcheck", instance, certificate.holds, certificate=certificate.to_dict())

    def cmd_reflect(self, path: str, variant: str = "perp", out: Optional[str] = None) -> Outcome:
        instance = self._load(path, "double-functor")
        reflection = REFLECTIONS[variant](instance.value)
        written = self._write(out, f"{instance.name}-{variant}", reflection.projection,
                              reflection=variant, source=instance.name,
                              certificate=reflection.certificate.to_dict())
        return self._report("reflect", instance, reflection.certificate.holds,
                            reflection=reflection.to_dict(), out=written)

    def cmd_roundtrip(self, path: str) -> Outcome:
        instance = self._load(path, "double-functor")
        report = roundtrip_iso(instance.value, mode=self.settings.mode, max_cells=self.settings.max_cells)
        return self._report("roundtrip", instance, report.ok, roundtrip=report.to_dict())

    def cmd_unstraighten(self, path: str, level: int = 1, out: Optional[str] = None) -> Outcome:
        if level == 1:
            instance = self._load(path, "cat-valued-functor")
            p, cleavage = unstraighten_1(instance.value)
            E = p.source
            written = self._write(out, f"{instance.name}-un", p, source=instance.name, level=1)
            return self._report("unstraighten", instance, True, level=1, objects=len(E.objects),
                                morphisms=len(E.morphisms), split=cleavage.split, out=written)
        if level == 2:
            instance = self._load(path, "two-cat-valued-functor")
            P, certificate = unstraighten_2(instance.value, self.settings.mode)
            E = P.source
            written = self._write(out, f"{instance.name}-un", P, source=instance.name, level=2,
                                  certificate=certificate.to_dict())
            return self._report("unstraighten", instance, certificate.holds, level=2,
                                objects=len(E.objects), one_cells=len(E.one_cells),
                                two_cells=len(E.two_cells), certificate=certificate.to_dict(), out=written)
        raise ValueError("level must be 1 or 2")

    def cmd_straighten(self, path: str, out: Optional[str] = None) -> Outcome:
        instance = self._load(path, "functor", "two-functor")
        if instance.kind == "functor":
            F = straighten_1(instance.value)
        else:
            F = straighten_2(instance.value, mode=self.settings.mode)
        written = self._write(out, f"{instance.name}-st", F, source=instance.name)
        return self._report("straighten", instance, True, values=len(F.on_objects), out=written)

    def cmd_compare_psi(self, path: str, kernels: Sequence[str] = ("K", "zeta", "eta", "theta", "T"),
                        window: Optional[Tuple[int, int]] = None) -> Outcome:
        instance = self._load(path, "double-functor")
        comparison = compare_kernels(instance.value, window or self.settings.window, kernels,
                                     self.settings.max_cells)
        return self._report("compare-psi", instance, comparison.ok, comparison=comparison.to_dict())

    def cmd_export_dot(self, path: str, out: Optional[str] = None) -> Outcome:
        instance = self._load(path)
        target = out or str(Path(path).with_suffix(".dot"))
        written = export_dot(instance.value, target, instance.name)
        return self._report("export-dot", instance, True, files=[str(p) for p in written])

    def cmd_gen(self, seed: int = 0, out: str = "corpus", size: Optional[int] = None,
                base_objects: Optional[int] = None) -> Outcome:
        entries = generate_corpus(seed, size, base_objects, self.settings.max_cells)
        manifest = write_corpus(entries, out)
        certified = sum(1 for e in entries if e.certificate.holds)
        return EXIT_OK, {'command': "gen", 'ok': True, 'seed': seed, 'entries': len(entries),
                         'certified': certified, 'manifest': str(manifest)}
