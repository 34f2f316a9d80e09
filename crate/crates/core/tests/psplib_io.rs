use proptest::prelude::*;

use mrcpsp_core::psplib::{parse_bounds_table, read_instance, write_bounds_table, BoundsTable};

#[test]
fn reads_sample_file_from_disk() {
    let p = read_instance(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/sample.mm")).unwrap();
    assert_eq!(p.job_count(), 10);
    assert_eq!(p.renewable_capacity, vec![9, 10]);
    assert_eq!(p.nonrenewable_capacity, vec![40, 38]);
    assert_eq!(p.horizon, 81);
    assert!(p.validate().is_empty());
}

#[test]
fn missing_file_is_io_error() {
    let err = read_instance("/nonexistent/x.mm").unwrap_err();
    assert!(err.to_string().starts_with("io error"));
}

#[test]
fn psplib_style_bounds_listing() {
    let text = "\
j10 optimal makespans
Par  Inst  Makespan  CPU-Time[sec]
----------------------------------
  1     1        15        0.02
  1     2        17        0.01
 64    10        21        0.30
";
    let t = parse_bounds_table(text).unwrap();
    assert_eq!(t.len(), 3);
    assert_eq!(t.get(64, 10), Some(21));
    assert_eq!(t.get(1, 3), None);
}

proptest! {
    #[test]
    fn bounds_round_trip(rows in prop::collection::btree_map((1u32..100, 1u32..20), 1u32..500, 0..40)) {
        let mut t = BoundsTable::default();
        for (&(p, i), &m) in &rows {
            t.insert(p, i, m);
        }
        prop_assert_eq!(parse_bounds_table(&write_bounds_table(&t)).unwrap(), t);
    }
}
