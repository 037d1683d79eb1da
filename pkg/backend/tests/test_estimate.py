"""
Études de cas : FORCE (run global), Galactic Plane (heures-cœur et
stockage), FastQC (trace, cluster contre cloud)
"""

import pytest

from app.carbon.schemas import CarbonIntensity
from app.core.errors import InvalidInput, InvalidPue, UnknownNode
from app.estimate.schemas import BulkRequest, CoreHoursRequest, FootprintReport
from app.estimate.service import (
    build_context,
    compare_reports,
    estimate_bulk,
    estimate_core_hours,
    estimate_task,
    estimate_trace,
    resolve_ci,
    storage_year_estimate,
    trace_start,
)
from app.model.loader import load_cluster, load_model
from app.model.units import Unit
from app.power.schemas import ComponentCoefficients
from app.trace.parser import parse_trace
from app.trace.schemas import TraceRecord


@pytest.fixture
def force(examples_dir) -> BulkRequest:
    return load_model(examples_dir / "force" / "force.json", BulkRequest)


@pytest.fixture
def force_report(force) -> FootprintReport:
    ctx = build_context(pue=force.pue, region=force.region, year=force.year)
    return estimate_bulk(force.run, force.node, ctx)


def fastqc_report(examples_dir, cluster_file: str, trace_file: str) -> FootprintReport:
    cluster = load_cluster(examples_dir / "fastqc" / cluster_file)
    trace = parse_trace((examples_dir / "fastqc" / trace_file).read_text(encoding="utf-8"))
    ctx = build_context(pue=cluster.pue, region=cluster.region, start=trace_start(trace))
    return estimate_trace(trace, cluster, ctx)


class TestForce:
    def test_component_energies(self, force_report):
        totals = force_report.totals
        assert totals.cpu.to(Unit.KWH).value == pytest.approx(7.06, rel=0.005)
        assert totals.memory.to(Unit.KWH).value == pytest.approx(0.691, rel=0.005)
        assert totals.storage.to(Unit.KWH).value == pytest.approx(2.14, rel=0.005)
        assert totals.energy_total.to(Unit.KWH).value == pytest.approx(9.90, rel=0.005)
        assert totals.energy_with_pue.to(Unit.KWH).value == pytest.approx(15.8, rel=0.005)

    def test_emissions(self, force_report):
        assert force_report.ci_gco2e_per_kwh == 439
        assert force_report.totals.operational.to(Unit.KG_CO2E).value == pytest.approx(6.95, rel=0.01)

    def test_embodied_share(self, force_report):
        assert force_report.totals.embodied.to(Unit.KG_CO2E).value == pytest.approx(1.5, rel=0.05)

    def test_three_runs(self, force):
        ctx = build_context(pue=force.pue, region=force.region, year=force.year)
        report = estimate_bulk(force.run, force.node, ctx, repetitions=3)
        assert report.repetitions == 3
        assert report.totals.operational.to(Unit.KG_CO2E).value == pytest.approx(20.8, rel=0.01)

    def test_single_bulk_line(self, force_report):
        assert [t.task_id for t in force_report.tasks] == ["bulk"]
        assert "memory attribution: full_node" in force_report.assumptions


class TestGalacticPlane:
    @pytest.fixture
    def request_(self, examples_dir) -> CoreHoursRequest:
        return load_model(examples_dir / "galactic-plane" / "core_hours.json", CoreHoursRequest)

    def test_core_hours(self, request_):
        ctx = build_context(pue=request_.pue, region=request_.region, year=request_.year)
        report = estimate_core_hours(request_.run, ctx)
        assert report.lower_bound
        assert report.totals.cpu.to(Unit.KWH).value == pytest.approx(674, rel=0.005)
        assert report.totals.energy_with_pue.to(Unit.KWH).value == pytest.approx(809, rel=0.005)
        assert report.totals.operational.to(Unit.KG_CO2E).value == pytest.approx(350, rel=0.01)

    def test_storage_year(self):
        estimate = storage_year_estimate(45, ComponentCoefficients(), 1.2, 433)
        assert estimate.energy_per_year.to(Unit.KWH).value == pytest.approx(473, rel=0.01)
        assert estimate.energy_per_year_with_pue.to(Unit.KWH).value == pytest.approx(568, rel=0.01)
        assert estimate.emissions_per_year.to(Unit.KG_CO2E).value == pytest.approx(246, rel=0.01)
        assert estimate.tape_emissions_per_year.to(Unit.KG_CO2E).value == pytest.approx(5.13, rel=0.001)
        assert estimate.ssd_embodied.to(Unit.KG_CO2E).value == pytest.approx(4950, rel=0.01)


class TestFastQC:
    def test_cluster_node(self, examples_dir):
        report = fastqc_report(examples_dir, "cluster.json", "cluster_trace.csv")
        task = report.tasks[0]
        assert task.energy_wh.cpu_wh == pytest.approx(0.91, rel=0.02)
        assert task.energy_wh.memory_wh == 0.0
        assert task.energy_wh_with_pue == pytest.approx(1.46, rel=0.02)
        assert task.emissions_g == pytest.approx(0.69, rel=0.02)

    def test_gcp_instance(self, examples_dir):
        report = fastqc_report(examples_dir, "gcp.json", "gcp_trace.csv")
        task = report.tasks[0]
        assert task.energy_wh_total == pytest.approx(0.30, rel=0.02)
        assert task.energy_wh_with_pue == pytest.approx(0.33, rel=0.02)
        assert task.emissions_g == pytest.approx(0.16, rel=0.02)

    def test_efficiency_ratio(self, examples_dir):
        cluster = fastqc_report(examples_dir, "cluster.json", "cluster_trace.csv")
        gcp = fastqc_report(examples_dir, "gcp.json", "gcp_trace.csv")
        comparison = compare_reports(cluster, gcp)
        assert 4.3 <= comparison.energy_with_pue <= 4.5
        assert comparison.storage is None

    def test_ci_keyed_on_run_start(self, examples_dir):
        report = fastqc_report(examples_dir, "cluster.json", "cluster_trace.csv")
        assert report.ci_gco2e_per_kwh == 473
        assert any("keyed on run start" in a for a in report.assumptions)


class TestTask:
    def record(self, **overrides) -> TraceRecord:
        values = dict(task_id="t", task_name="x", node_id="tub-cluster-node", realtime_s=100.0,
                      allocated_cores=2, cpu_utilisation=0.5, peak_memory_gb=2.0)
        values.update(overrides)
        return TraceRecord(**values)

    def test_zero_duration(self, force):
        footprint = estimate_task(self.record(realtime_s=0.0), force.node, ComponentCoefficients(), 1.6, 439)
        assert footprint.energy_wh_total == 0.0
        assert footprint.emissions_g == 0.0

    def test_memory_attribution(self, force):
        coeffs = ComponentCoefficients()
        allocated = estimate_task(self.record(), force.node, coeffs, 1.0, 100)
        full = estimate_task(self.record(), force.node, coeffs, 1.0, 100, memory_attribution="full_node")
        assert allocated.energy_wh.memory_wh == pytest.approx(2.0 * 0.392 * 100 / 3600)
        assert full.energy_wh.memory_wh == pytest.approx(16.0 * 0.392 * 100 / 3600)

    def test_storage_attribution(self, force):
        shared = estimate_task(self.record(), force.node, ComponentCoefficients(), 1.0, 100, attribute_storage=True)
        assert shared.energy_wh.storage_wh == pytest.approx(19.5 * 2 / 8 * 100 / 3600)

    def test_overutilisation_clamped(self, force):
        over = estimate_task(self.record(cpu_utilisation=1.3), force.node, ComponentCoefficients(), 1.0, 100)
        full = estimate_task(self.record(cpu_utilisation=1.0), force.node, ComponentCoefficients(), 1.0, 100)
        assert over.energy_wh.cpu_wh == full.energy_wh.cpu_wh

    def test_wrong_node(self, force):
        with pytest.raises(UnknownNode):
            estimate_task(self.record(node_id="other"), force.node, ComponentCoefficients(), 1.0, 100)


class TestContext:
    def test_resolve_ci_priority(self):
        assert resolve_ci(ci=12.0, region="DE", year=2021)[0] == 12.0
        assert resolve_ci(region="DE", year=2021) == (439, "annual average DE 2021")

    def test_missing_ci(self):
        with pytest.raises(InvalidInput):
            resolve_ci()

    def test_invalid_pue(self):
        with pytest.raises(InvalidPue):
            build_context(pue=0.8, ci=100)

    def test_identical_reports_compare_to_one(self, force_report):
        comparison = compare_reports(force_report, force_report)
        assert comparison.energy_total == 1.0
        assert comparison.emissions == 1.0


class TestLinearity:
    @pytest.mark.parametrize("parts", [2, 3, 7])
    def test_split_run_has_same_totals(self, force, parts):
        ctx = build_context(pue=force.pue, region=force.region, year=force.year)
        whole = estimate_bulk(force.run, force.node, ctx)
        piece = force.run.model_copy(update={"duration_s": force.run.duration_s / parts})
        split = estimate_bulk(piece, force.node, ctx, repetitions=parts)
        for field in ("cpu", "memory", "storage", "energy_total", "operational", "embodied"):
            assert getattr(split.totals, field).value == pytest.approx(getattr(whole.totals, field).value, rel=1e-12)

    def test_split_nodes_add_up(self, force):
        ctx = build_context(pue=force.pue, region=force.region, year=force.year)
        whole = estimate_bulk(force.run, force.node, ctx)
        parts = [
            estimate_bulk(force.run.model_copy(update={"node_count": n}), force.node, ctx) for n in (5, 16)
        ]
        assert sum(p.totals.energy_total.value for p in parts) == pytest.approx(whole.totals.energy_total.value)
        assert sum(p.totals.operational.value for p in parts) == pytest.approx(whole.totals.operational.value)

    @pytest.mark.parametrize("pue,ci", [(1.0, 0.0), (1.2, 56.0), (1.6, 439.0), (2.0, 800.0)])
    def test_emissions_follow_energy(self, force, pue, ci):
        report = estimate_bulk(force.run, force.node, build_context(pue=pue, ci=ci))
        kwh = report.totals.energy_total.to(Unit.KWH).value
        assert report.totals.operational.value == pytest.approx(kwh * pue * ci)
        assert report.tasks[0].emissions_g == pytest.approx(kwh * pue * ci)

    def test_whole_node_task_equals_one_node_run(self, force):
        duration = 3600.0
        record = TraceRecord(
            task_id="t", task_name="x", node_id=force.node.id, realtime_s=duration,
            allocated_cores=force.node.virtual_cores, cpu_utilisation=0.5, peak_memory_gb=1.0,
        )
        task = estimate_task(
            record, force.node, ComponentCoefficients(), 1.6, 439,
            memory_attribution="full_node", attribute_storage=True,
        )
        run = force.run.model_copy(update={"node_count": 1, "duration_s": duration, "mean_cpu_utilisation": 0.5})
        bulk = estimate_bulk(run, force.node, build_context(pue=1.6, ci=439)).tasks[0]
        assert task.energy_wh.cpu_wh == pytest.approx(bulk.energy_wh.cpu_wh, rel=1e-12)
        assert task.energy_wh.memory_wh == pytest.approx(bulk.energy_wh.memory_wh, rel=1e-12)
        assert task.energy_wh.storage_wh == pytest.approx(bulk.energy_wh.storage_wh, rel=1e-12)
        assert task.emissions_g == pytest.approx(bulk.emissions_g, rel=1e-12)


class TestTraceReport:
    def test_task_groups(self, examples_dir):
        report = fastqc_report(examples_dir, "cluster.json", "cluster_trace.csv")
        assert list(report.task_groups) == ["FASTQC"]
        assert report.task_groups["FASTQC"].count == len(report.tasks)

    def test_annual_table_override(self, force):
        table = {("DE", 2021): CarbonIntensity(region="DE", year=2021, value=100.0, source="user")}
        ctx = build_context(pue=force.pue, region="DE", year=2021, table=table)
        assert ctx.ci == 100.0
