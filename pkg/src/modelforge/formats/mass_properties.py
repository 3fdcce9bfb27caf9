"""Object mass-property files.

::

    segment, UseMeanDensity, density
    segment, UseUserValues, mass, com_x, com_y, com_z, i11, i12, i13, i21, ..., i33

Inertia entries are row-major. Trailing empty fields are ignored.
"""

from modelforge.diagnostics import DiagnosticLog
from modelforge.formats.common import format_number, iter_lines, parse_numbers
from modelforge.mesh import MassPolicy, MassPolicyKind
from modelforge.spatial import as_mat3, as_vec3

_FIELD_COUNTS = {MassPolicyKind.USE_MEAN_DENSITY: 3, MassPolicyKind.USE_USER_VALUES: 15}


def _policy_kind(value: str) -> MassPolicyKind | None:
    lowered = value.lower()
    return next((k for k in MassPolicyKind if k.value.lower() == lowered), None)


def parse_mass_properties(
    text: str, source: str = "<mass properties>", log: DiagnosticLog | None = None
) -> dict[str, MassPolicy]:
    """Parse mass policies keyed by segment name (or segment type).

    Raises:
        ParseError: ``UnknownMassPolicy``, ``WrongFieldCount``,
            ``NonNumericValue``, ``NegativeValue``, ``EmptyName`` or
            ``DuplicateEntry``.
    """
    file_log = DiagnosticLog(source)
    policies: dict[str, MassPolicy] = {}

    for line in iter_lines(text):
        fields = line.trimmed()
        if len(fields) < 2:
            file_log.error(
                "WrongFieldCount", "expected 'segment, policy, values'", line=line.number
            )
            continue
        segment, policy_name = fields[0], fields[1]
        if not segment:
            file_log.error("EmptyName", "segment name is empty", line=line.number)
            continue
        kind = _policy_kind(policy_name)
        if kind is None:
            file_log.error(
                "UnknownMassPolicy",
                f"mass policy must be UseMeanDensity or UseUserValues, got {policy_name!r}",
                line=line.number,
                location=segment,
            )
            continue
        if len(fields) != _FIELD_COUNTS[kind]:
            file_log.error(
                "WrongFieldCount",
                f"{kind.value} expects {_FIELD_COUNTS[kind]} fields, got {len(fields)}",
                line=line.number,
                location=segment,
            )
            continue
        numbers = parse_numbers(fields[2:], file_log, line.number, kind.value)
        if numbers is None:
            continue
        if numbers[0] < 0:
            what = "density" if kind == MassPolicyKind.USE_MEAN_DENSITY else "mass"
            file_log.error(
                "NegativeValue",
                f"{what} must not be negative: {numbers[0]}",
                line=line.number,
                location=segment,
            )
            continue
        if segment in policies:
            file_log.error(
                "DuplicateEntry", f"{segment} given more than once", line=line.number
            )
            continue

        if kind == MassPolicyKind.USE_MEAN_DENSITY:
            policy = MassPolicy(segment, kind, density=numbers[0], line=line.number)
        else:
            policy = MassPolicy(
                segment,
                kind,
                mass=numbers[0],
                com=as_vec3(numbers[1:4]),
                inertia=as_mat3(numbers[4:13]),
                line=line.number,
            )
        policies[segment] = policy

    if log is not None:
        log.extend(file_log)
    file_log.raise_if_errors()
    return policies


def serialize_mass_properties(policies: dict[str, MassPolicy]) -> str:
    lines = []
    for policy in policies.values():
        if policy.kind == MassPolicyKind.USE_MEAN_DENSITY:
            values = [format_number(policy.density or 0.0)]
        else:
            assert policy.com is not None and policy.inertia is not None
            values = [
                format_number(policy.mass or 0.0),
                *(format_number(c) for c in policy.com),
                *(format_number(v) for row in policy.inertia for v in row),
            ]
        lines.append(", ".join([policy.segment, policy.kind.value, *values]))
    return "\n".join(lines) + "\n"
