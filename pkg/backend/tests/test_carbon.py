import io
import random
from datetime import datetime, timedelta, timezone

import pytest

from app.carbon.accounting import embodied_share, operational_emissions, ssd_embodied, tape_storage_year
from app.carbon.intensity import ci_lookup, load_annual_csv, load_series_csv, rank_regions, series_value_at
from app.carbon.schemas import CarbonIntensitySeries, EmbodiedProfile
from app.carbon.shifting import best_start_time, emissions_for_start, load_profile_csv, scale_profile
from app.core.errors import (
    InvalidInput,
    InvalidPue,
    SeriesCoverageInsufficient,
    TimestampOutOfRange,
    UnknownRegion,
)

T0 = datetime(2023, 1, 1, tzinfo=timezone.utc)


def hourly(values, region="XX") -> CarbonIntensitySeries:
    return CarbonIntensitySeries(
        region=region,
        samples=tuple((T0 + timedelta(hours=i), float(v)) for i, v in enumerate(values)),
    )


class TestAccounting:
    def test_operational_emissions_force(self):
        # 9,897 kWh * 1,6 * 439
        assert operational_emissions(9.897375, 1.6, 439) == pytest.approx(6952, rel=1e-3)

    def test_invalid_pue(self):
        with pytest.raises(InvalidPue):
            operational_emissions(1.0, 0.9, 100)

    def test_embodied_share_force(self):
        profile = EmbodiedProfile(embodied_kgco2e=1200, lifetime_years=10)
        assert embodied_share(profile, 18900, node_count=21) == pytest.approx(1.51, rel=0.01)

    def test_storage_constants(self):
        assert tape_storage_year(45) == pytest.approx(5.13)
        assert ssd_embodied(45) == pytest.approx(4949.6, rel=1e-3)


class TestIntensity:
    def test_bundled_table(self):
        assert ci_lookup(None, "DE", 2021) == 439
        assert ci_lookup(None, "DE", datetime(2022, 5, 1)) == 473

    def test_unknown_region(self):
        with pytest.raises(UnknownRegion):
            ci_lookup(None, "ATLANTIS", 2021)
        with pytest.raises(UnknownRegion):
            ci_lookup(None, "DE", 1990)

    def test_series_is_left_closed(self):
        series = hourly([100, 200])
        assert series_value_at(series, T0) == 100
        assert series_value_at(series, T0 + timedelta(minutes=59)) == 100
        assert series_value_at(series, T0 + timedelta(hours=1)) == 200

    def test_series_out_of_range(self):
        series = hourly([100, 200])
        with pytest.raises(TimestampOutOfRange):
            series_value_at(series, T0 - timedelta(seconds=1))
        with pytest.raises(TimestampOutOfRange):
            series_value_at(series, T0 + timedelta(hours=2))

    def test_series_requires_increasing_timestamps(self):
        with pytest.raises(ValueError):
            CarbonIntensitySeries(region="XX", samples=((T0, 1.0), (T0, 2.0)))

    def test_load_series_csv(self, examples_dir):
        series = load_series_csv(examples_dir / "shift" / "ci.csv", "DE")
        assert series.start == T0
        assert series.coverage_end == T0 + timedelta(hours=4)
        assert ci_lookup(series, "DE", T0 + timedelta(hours=2, minutes=30)) == 10

    def test_load_annual_csv_rejects_bad_header(self):
        with pytest.raises(InvalidInput):
            load_annual_csv(io.StringIO("zone,year,value\nDE,2021,439\n"))

    def test_rank_regions(self):
        ranked = rank_regions(["DE", "FR", "SE", "UK"], 2022)
        assert [e.region for e in ranked] == ["SE", "FR", "UK", "DE"]
        assert [e.emissions_g for e in ranked] == [0.0] * 4
        priced = rank_regions(["DE", "FR"], 2022, energy_kwh=2.0, pue=1.2)
        assert [e.emissions_g for e in priced] == pytest.approx([2.0 * 1.2 * 90, 2.0 * 1.2 * 473])
        with pytest.raises(UnknownRegion):
            rank_regions(["DE", "MARS"], 2022)


class TestShifting:
    def test_example_prefers_low_carbon_hour(self, examples_dir):
        series = load_series_csv(examples_dir / "shift" / "ci.csv", "DE")
        profile = load_profile_csv(examples_dir / "shift" / "profile.csv")
        result = best_start_time(profile, series, (T0, T0 + timedelta(hours=2)), 3600)
        assert result.start == T0 + timedelta(hours=2)
        assert result.emissions_g == pytest.approx(10.0)
        assert result.baseline_emissions_g == pytest.approx(400.0)
        assert result.candidates == 3

    def test_profile_spanning_intervals(self):
        series = hourly([100, 300])
        # 30 min à 2 kW à cheval sur les deux heures
        value = emissions_for_start([(1800, 2000)], series, T0 + timedelta(minutes=45))
        assert value == pytest.approx(2.0 * 0.25 * 100 + 2.0 * 0.25 * 300)

    def test_ties_keep_earliest(self):
        series = hourly([50, 50, 50, 50])
        result = best_start_time([(600, 1000)], series, (T0, T0 + timedelta(hours=2)), 600)
        assert result.start == T0

    def test_coverage_checked(self):
        series = hourly([50, 50])
        with pytest.raises(SeriesCoverageInsufficient):
            best_start_time([(3600, 100)], series, (T0, T0 + timedelta(hours=2)), 3600)

    def test_invalid_window(self):
        series = hourly([50, 50])
        with pytest.raises(InvalidInput):
            best_start_time([(60, 100)], series, (T0 + timedelta(hours=1), T0), 60)
        with pytest.raises(InvalidInput):
            best_start_time([(60, 100)], series, (T0, T0), 0)

    def test_scale_profile(self):
        assert scale_profile([(10, 100)], 1.5) == [(10, 150)]
        with pytest.raises(InvalidPue):
            scale_profile([(10, 100)], 0.5)


def _oracle_emissions(profile, samples, end, start):
    """Intersection directe de chaque segment avec chaque intervalle de la série"""
    total = 0.0
    cursor = start
    edges = [ts for ts, _ in samples] + [end]
    for duration, watts in profile:
        seg_start, seg_end = cursor, cursor + timedelta(seconds=duration)
        for (lo, value), hi in zip(samples, edges[1:]):
            overlap = (min(seg_end, hi) - max(seg_start, lo)).total_seconds()
            if overlap > 0:
                total += watts * overlap / 3600 / 1000 * value
        cursor = seg_end
    return total


def test_shift_matches_exhaustive_minute_scan():
    rng = random.Random(42)
    for _ in range(100):
        ts, samples = T0, []
        for _ in range(rng.randint(2, 8)):
            samples.append((ts, float(rng.randint(0, 500))))
            ts += timedelta(minutes=5 * rng.randint(1, 12))
        end = ts
        series = CarbonIntensitySeries(region="XX", samples=tuple(samples), end=end)

        profile = [(60.0 * rng.randint(1, 20), float(rng.randint(1, 3000))) for _ in range(rng.randint(1, 3))]
        duration = sum(d for d, _ in profile)
        span_min = int(((end - T0).total_seconds() - duration) // 60)
        if span_min < 0:
            continue
        window = (T0, T0 + timedelta(minutes=span_min))

        result = best_start_time(profile, series, window, 60)

        scores = [_oracle_emissions(profile, samples, end, T0 + timedelta(minutes=m)) for m in range(span_min + 1)]
        best = min(scores)
        earliest = next(m for m, s in enumerate(scores) if s <= best + 1e-9 * max(1.0, best))
        assert result.emissions_g == pytest.approx(best, rel=1e-9, abs=1e-9)
        assert result.start == T0 + timedelta(minutes=earliest)
        assert result.candidates == span_min + 1


@pytest.mark.parametrize("shift", [0.0, 25.0, 137.5])
def test_constant_offset_adds_energy_times_offset(shift):
    rng = random.Random(int(shift) + 3)
    values = [rng.randint(0, 500) for _ in range(12)]
    profile = scale_profile([(1800.0, 400.0), (2700.0, 1200.0)], 1.3)
    window = (T0, T0 + timedelta(hours=6))

    base = best_start_time(profile, hourly(values), window, 900)
    shifted = best_start_time(profile, hourly([v + shift for v in values]), window, 900)

    assert shifted.energy_kwh == pytest.approx((1800 * 400 + 2700 * 1200) * 1.3 / 3.6e6)
    assert shifted.emissions_g == pytest.approx(base.emissions_g + base.energy_kwh * shift)
    assert emissions_for_start(profile, hourly([v + shift for v in values]), base.start) == pytest.approx(
        shifted.emissions_g
    )


def test_constant_offset_keeps_best_start(examples_dir):
    profile = load_profile_csv(examples_dir / "shift" / "profile.csv")
    series = load_series_csv(examples_dir / "shift" / "ci.csv", "DE")
    raised = CarbonIntensitySeries(
        region="DE", samples=tuple((ts, v + 80.0) for ts, v in series.samples), end=series.end
    )
    window = (T0, T0 + timedelta(hours=2))
    assert best_start_time(profile, raised, window, 3600).start == best_start_time(profile, series, window, 3600).start


@pytest.mark.parametrize("duration_s,count", [(0.0, 1), (3600.0, 1), (3600.0, 4), (86400.0 * 30, 21)])
def test_embodied_share_is_linear(duration_s, count):
    profile = EmbodiedProfile(embodied_kgco2e=1200, lifetime_years=10)
    one = embodied_share(profile, 1.0, 1)
    assert embodied_share(profile, duration_s, count) == pytest.approx(one * duration_s * count)
    assert embodied_share(profile, 2 * duration_s, count) == pytest.approx(2 * embodied_share(profile, duration_s, count))


def test_embodied_share_over_whole_lifetime():
    profile = EmbodiedProfile(embodied_kgco2e=1200, lifetime_years=10)
    assert embodied_share(profile, profile.lifetime_s, 1) == 1200


def test_non_utf8_series_rejected(tmp_path):
    path = tmp_path / "ci.csv"
    path.write_bytes(b"timestamp,gco2e_per_kwh\n2023-01-01T00:00:00Z,\xff\n")
    with pytest.raises(InvalidInput):
        load_series_csv(path, "DE")
    with pytest.raises(InvalidInput):
        load_profile_csv(path)
