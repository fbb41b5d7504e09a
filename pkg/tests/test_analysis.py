import pytest

from rwasim.analysis import clements_loss, loss_report, wa_loss


class TestClementsLoss:
    def test_eleven_modes(self):
        count, depth, total = clements_loss(11)
        assert count == 55
        assert depth == 11
        assert total == pytest.approx(2.2)

    def test_two_modes(self):
        count, depth, total = clements_loss(2)
        assert count == 1
        assert total == pytest.approx(0.4)

    def test_zero_per_mzi(self):
        _, _, total = clements_loss(8, per_mzi_db=0.0)
        assert total == 0.0

    def test_too_few_modes(self):
        with pytest.raises(ValueError):
            clements_loss(1)

    def test_monotone_in_modes(self):
        counts, totals = zip(*(
            (clements_loss(n)[0], clements_loss(n)[2]) for n in range(2, 30)
        ))
        assert all(a < b for a, b in zip(counts, counts[1:]))
        assert all(a < b for a, b in zip(totals, totals[1:]))


class TestWaLoss:
    def test_device_length(self):
        assert wa_loss(2.4) == pytest.approx(0.24)

    def test_zero_length(self):
        assert wa_loss(0.0) == 0.0

    def test_long_chip(self):
        assert wa_loss(20.0) == pytest.approx(2.0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            wa_loss(-1.0)

    def test_linear_in_length(self):
        assert wa_loss(3.7) + wa_loss(1.3) == wa_loss(5.0)


class TestLossReport:
    def test_report_fields(self):
        report = loss_report(11)
        assert report.mzi_count == 55
        assert report.clements_loss_db == pytest.approx(2.2)
        assert report.wa_loss_db == pytest.approx(0.24)
        assert "bending" in report.note

    def test_text_and_csv(self, tmp_path):
        report = loss_report(11)
        text = report.to_text()
        assert "55" in text and "2.2" in text
        path = tmp_path / "loss.csv"
        report.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("n_modes,mzi_count")
        assert lines[1].startswith("11,55,11,")
