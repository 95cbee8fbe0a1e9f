from dataclasses import dataclass, field

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lunarhab.engine import (
    ArityError,
    ChannelSpec,
    CoordinationBus,
    DuplicateId,
    DuplicateProducer,
    Engine,
    NonIntegralPeriod,
    SignalFrame,
    SignalKind,
    SubsystemDescriptor,
    SubsystemStepError,
    UnproducedChannel,
)


@dataclass
class Probe:
    """Counts steps and echoes what it read."""

    id: str
    period: float = 1.0
    inputs: tuple[str, ...] = ()
    outputs: tuple[ChannelSpec, ...] = ()
    calls: list = field(default_factory=list)

    def __post_init__(self):
        self.descriptor = SubsystemDescriptor(self.id, self.period, self.inputs, self.outputs)

    def step(self, now, dt, inputs):
        self.calls.append((now, dt, dict(inputs)))
        return {spec.name: tuple(now for _ in spec.initial) for spec in self.outputs}


def spec(name, initial=(0.0,)):
    return ChannelSpec(name, SignalKind.PHYSICAL, initial)


def test_register_accepts_integral_period():
    eng = Engine(0.1, 10.0)
    assert eng.register(Probe("ie", 1.0)) == "ie"


def test_duplicate_id_rejected():
    eng = Engine(0.1, 10.0)
    eng.register(Probe("ECLSS"))
    with pytest.raises(DuplicateId):
        eng.register(Probe("ECLSS"))


def test_non_integral_period_rejected():
    with pytest.raises(NonIntegralPeriod):
        Engine(0.1, 10.0).register(Probe("x", 0.25))


def test_unproduced_input_reported_at_finalize():
    eng = Engine(0.1, 10.0)
    eng.register(Probe("a", inputs=("nobody.makes.this",)))
    with pytest.raises(UnproducedChannel, match="nobody.makes.this"):
        eng.finalize()


def test_duplicate_producer_rejected():
    eng = Engine(0.1, 10.0)
    eng.register(Probe("a", outputs=(spec("x"),)))
    with pytest.raises(DuplicateProducer):
        eng.register(Probe("b", outputs=(spec("x"),)))


def test_latest_value_wins():
    bus = CoordinationBus()
    bus.add_producer("ie", spec("T_zone2"))
    bus.publish(SignalFrame("ie", "T_zone2", SignalKind.PHYSICAL, (300.0,), 4.0))
    bus.publish(SignalFrame("ie", "T_zone2", SignalKind.PHYSICAL, (301.0,), 5.0))
    assert bus.value("T_zone2") == (301.0,)


def test_unpublished_channel_fuses_to_initial():
    bus = CoordinationBus()
    bus.add_producer("disturbance", ChannelSpec("fire_intensity", SignalKind.DISTURBANCE, (1.0,)))
    assert bus.fuse(["fire_intensity"]) == {"fire_intensity": (1.0,)}


def test_fused_set_has_one_entry_per_declared_channel():
    bus = CoordinationBus()
    for name in ("a", "b", "c"):
        bus.add_producer("p", spec(name))
        bus.publish(SignalFrame("p", name, SignalKind.PHYSICAL, (1.0,), 0.0))
    assert len(bus.fuse(["a", "b", "c"])) == 3


def test_arity_mismatch_rejected():
    bus = CoordinationBus()
    bus.add_producer("p", spec("v", (0.0, 0.0)))
    with pytest.raises(ArityError):
        bus.publish(SignalFrame("p", "v", SignalKind.PHYSICAL, (1.0,), 0.0))


def test_outputs_visible_one_tick_later():
    src = Probe("src", 1.0, outputs=(spec("x", (-1.0,)),))
    dst = Probe("dst", 1.0, inputs=("x",))
    eng = Engine(0.1, 3.0)
    eng.register(src)
    eng.register(dst)
    eng.run()
    seen = [(now, inputs["x"][0]) for now, _, inputs in dst.calls]
    # At t=0 the consumer sees the declared initial value, then the value
    # its producer published on the previous step.
    assert seen == [(0.0, -1.0), (1.0, 0.0), (2.0, 1.0), (3.0, 2.0)]


def test_first_step_has_zero_dt():
    p = Probe("p", 0.5)
    eng = Engine(0.1, 1.0)
    eng.register(p)
    eng.run()
    assert [dt for _, dt, _ in p.calls] == [0.0, 0.5, 0.5]


def test_subsystem_exception_wrapped():
    class Boom(Probe):
        def step(self, now, dt, inputs):
            if now >= 2.0:
                raise RuntimeError("bad")
            return {}

    eng = Engine(0.1, 5.0)
    eng.register(Boom("boom"))
    with pytest.raises(SubsystemStepError) as info:
        eng.run()
    assert info.value.subsystem_id == "boom"
    assert info.value.time == pytest.approx(2.0)


def test_observer_sees_outputs_of_its_tick():
    src = Probe("src", 1.0, outputs=(spec("x"),))
    eng = Engine(0.1, 2.0)
    eng.register(src)
    got = []
    eng.add_observer(1.0, lambda now, bus: got.append((now, bus.value("x")[0])))
    eng.run()
    assert got == [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]


@settings(max_examples=40, deadline=None)
@given(
    base_ms=st.sampled_from([50, 100, 200]),
    multiples=st.lists(st.integers(1, 20), min_size=1, max_size=4),
    end=st.integers(0, 60),
)
def test_step_counts_match_floor_formula(base_ms, multiples, end):
    base = base_ms / 1000.0
    eng = Engine(base, float(end))
    probes = [Probe(f"s{i}", m * base) for i, m in enumerate(multiples)]
    for p in probes:
        eng.register(p)
    eng.run()
    last_tick = int(round(end / base))
    for m, p in zip(multiples, probes):
        assert len(p.calls) == last_tick // m + 1
