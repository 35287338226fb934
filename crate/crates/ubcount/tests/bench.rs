use std::time::Duration;

use ubcount::bench::{
    compare_run, error_metric, family_suite, geomean_abs, mean_signed, par2, paired_errors,
    read_jsonl, summarize, write_csv, write_jsonl, BenchInstance, CompareConfig, CountValue, Mode,
    RunRecord, Status,
};
use ubcount_core::gen_theorem1;

fn cv(mantissa: u64, exponent: u32) -> CountValue {
    CountValue { mantissa, exponent }
}

fn rec(id: &str, mode: Mode, secs: f64, status: Status) -> RunRecord {
    RunRecord {
        instance: id.into(),
        mode,
        support_size: 1,
        pre_time_s: secs / 2.0,
        count_time_s: secs / 2.0,
        status,
        count: (status == Status::Solved).then_some(cv(1, 0)),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

#[test]
fn error_fixtures() {
    // Values computed independently: log2(63) + 67 - log2(50) - 65.
    let e = error_metric(cv(63, 67), cv(50, 65));
    assert!(close(e, 2.3334237337251977), "{e}");
    assert_eq!(error_metric(cv(5, 3), cv(5, 3)), 0.0);
    assert_eq!(error_metric(cv(6, 4), cv(3, 4)), 1.0);
    assert_eq!(error_metric(cv(1, 40), cv(1, 39)), 1.0);
    assert_eq!(error_metric(cv(0, 0), cv(3, 1)), f64::NEG_INFINITY);
    assert_eq!(error_metric(cv(3, 1), cv(0, 0)), f64::INFINITY);
}

#[test]
fn par2_fixtures() {
    let t = Duration::from_secs(5000);
    let all = vec![rec("a", Mode::Ubs, 10.0, Status::Solved), rec("b", Mode::Ubs, 10.0, Status::Solved)];
    assert_eq!(par2(&all, t), Some(10.0));
    let mixed = vec![rec("a", Mode::Ubs, 10.0, Status::Solved), rec("b", Mode::Ubs, 4000.0, Status::Timeout)];
    assert_eq!(par2(&mixed, t), Some(5005.0));
    let none = vec![rec("a", Mode::Ubs, 1.0, Status::Timeout), rec("b", Mode::Ubs, 1.0, Status::Memout)];
    assert_eq!(par2(&none, t), Some(10000.0));
    assert_eq!(par2(&[], t), None);
    let mut rev = mixed.clone();
    rev.reverse();
    assert_eq!(par2(&rev, t), par2(&mixed, t));
}

#[test]
fn geomean_fixtures() {
    let g = geomean_abs(&[2.0, 2.0, 2.0]).unwrap();
    assert!(close(g.value, 2.0));
    assert!(close(geomean_abs(&[1.0, 4.0]).unwrap().value, 2.0));
    assert!(close(geomean_abs(&[-1.0, 4.0]).unwrap().value, 2.0));
    let z = geomean_abs(&[0.0, 2.0]).unwrap();
    assert_eq!(z.substitutions, 1);
    assert!(close(z.value, 0.04419417382415922));
    let x = geomean_abs(&[0.5, f64::INFINITY, -3.0, 1.5]).unwrap();
    assert_eq!(x.excluded, 1);
    assert!(close(x.value, 1.3103706971044484));
    assert_eq!(geomean_abs(&[]), None);
    assert_eq!(mean_signed(&[1.0, -3.0, f64::NAN]), Some(-1.0));
}

#[test]
fn records_round_trip_as_json_lines() {
    let mut rs = vec![rec("x", Mode::Is, 0.25, Status::Solved), rec("x", Mode::Ubs, 3.5, Status::Timeout)];
    rs[0].count = Some(cv(63, 67));
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &rs).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("\"mode\":\"IS\""));
    assert!(text.contains("\"status\":\"timeout\""));
    assert_eq!(read_jsonl(&buf[..]).unwrap(), rs);
}

#[test]
fn csv_columns() {
    let mut rs = vec![rec("x", Mode::Is, 1.0, Status::Solved), rec("x", Mode::Ubs, 1.0, Status::Solved)];
    rs[0].count = Some(cv(50, 65));
    rs[1].count = Some(cv(63, 67));
    let mut buf = Vec::new();
    write_csv(&mut buf, &rs).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "instance,mode,support_size,pre_time_s,count_time_s,status,mantissa,exponent,error"
    );
    assert!(lines[1].starts_with("x,IS,1,0.5,0.5,solved,50,65,"));
    assert!(lines[2].starts_with("x,UBS,1,0.5,0.5,solved,63,67,2.333"));
}

#[test]
fn compare_on_small_binary_family() {
    let inst = gen_theorem1(4).unwrap();
    let b = BenchInstance { id: "phi4".into(), formula: inst.formula, projection: inst.projection };
    let rs = compare_run(std::slice::from_ref(&b), &CompareConfig::default());
    assert_eq!(rs.len(), 2);
    assert_eq!((rs[0].mode, rs[0].support_size), (Mode::Is, 3));
    assert_eq!((rs[1].mode, rs[1].support_size), (Mode::Ubs, 2));
    assert!(rs.iter().all(|r| r.status == Status::Solved && r.count == Some(cv(4, 0))));
    assert_eq!(paired_errors(&rs), vec![("phi4".to_string(), 0.0)]);

    let forced = CompareConfig { timeout_pre: Duration::ZERO, ..CompareConfig::default() };
    let rs = compare_run(&[b], &forced);
    assert_eq!(rs[1].support_size, 3);
    assert_eq!(rs[1].count, Some(cv(4, 0)));
}

#[test]
fn family_suite_end_to_end() {
    let suite = family_suite();
    let cfg = CompareConfig { workers: 3, ..CompareConfig::default() };
    let rs = compare_run(&suite, &cfg);
    assert_eq!(rs.len(), 2 * suite.len());
    assert!(rs.windows(2).all(|w| (&w[0].instance, w[0].mode) < (&w[1].instance, w[1].mode)));
    assert!(rs.iter().all(|r| r.status == Status::Solved));
    let s = summarize(&rs, Duration::from_secs(10_000));
    assert_eq!(s.solved_ubs, suite.len());
    let ubs: Vec<RunRecord> = rs.iter().filter(|r| r.mode == Mode::Ubs).cloned().collect();
    assert_eq!(s.par2_ubs, par2(&ubs, Duration::from_secs(10_000)));
    // Every family count is below the pivot, so both pipelines are exact.
    assert_eq!(s.mean_signed_error, Some(0.0));
    assert_eq!(s.geomean_abs_error.unwrap().substitutions, suite.len());
}
