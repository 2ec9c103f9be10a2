use ecg_gp::io::{
    decode_format212, encode_format212, read_csv_record, read_wfdb_record, write_csv_record,
    EcgRecord,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn format212_values_round_trip(values in prop::collection::vec(-2048i16..=2047, 0..200)) {
        let bytes = encode_format212(&values).unwrap();
        prop_assert_eq!(bytes.len(), (3 * values.len()).div_ceil(2));
        prop_assert_eq!(decode_format212(&bytes, values.len()).unwrap(), values);
    }

    #[test]
    fn csv_round_trip_is_exact(
        n_leads in 1usize..4,
        n in 1usize..60,
        seed in any::<u64>(),
    ) {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            f64::from_bits((state >> 12) | 0x3ff0_0000_0000_0000) - 1.5
        };
        let leads: Vec<Vec<f64>> = (0..n_leads)
            .map(|_| (0..n).map(|_| next() * 1e3f64.powi((next() * 4.0) as i32)).collect())
            .collect();
        let rec = EcgRecord::new("r", 360.0, leads.clone()).unwrap();
        let text = write_csv_record(&rec).unwrap();
        let back = read_csv_record(&text, 360.0, false).unwrap();
        prop_assert_eq!(back.leads(), &leads[..]);
    }

    #[test]
    fn wfdb_record_applies_gain_and_baseline(
        frames in prop::collection::vec((-2048i16..=2047, -2048i16..=2047), 1..50),
        gain in 1u32..500,
        baseline in -100i32..100,
    ) {
        let interleaved: Vec<i16> = frames.iter().flat_map(|&(a, b)| [a, b]).collect();
        let dat = encode_format212(&interleaved).unwrap();
        let header = format!(
            "rec 2 250 {n}\nrec.dat 212 {gain}({baseline})/mV 12 0 0 0 0 I\nrec.dat 212 {gain}({baseline})/mV 12 0 0 0 0 II\n",
            n = frames.len(),
        );
        let rec = read_wfdb_record(&header, &dat).unwrap();
        for (i, &(a, b)) in frames.iter().enumerate() {
            let expect = |v: i16| (v as f64 - baseline as f64) / gain as f64;
            prop_assert_eq!(rec.lead(0).unwrap()[i], expect(a));
            prop_assert_eq!(rec.lead(1).unwrap()[i], expect(b));
        }
    }
}
