use heatmap_tsp::heatmap::HeatMap;
use heatmap_tsp::instance::{DistanceMatrix, Instance};
use heatmap_tsp::search::random_tour;
use heatmap_tsp::svg::tour_svg;
use heatmap_tsp::tour::Tour;
use heatmap_tsp::Error;
use ndarray::Array2;

const GOLDEN_N10_SEED1: &str = include_str!("data/random_n10_seed1.txt");

#[test]
fn random_instance_matches_golden_file() {
    let inst = Instance::random(10, 1).unwrap();
    assert_eq!(inst.to_text(), GOLDEN_N10_SEED1);
}

#[test]
fn golden_file_parses_back() {
    let inst = Instance::from_text(GOLDEN_N10_SEED1).unwrap();
    assert_eq!(inst.coords(), Instance::random(10, 1).unwrap().coords());
    for &(x, y) in inst.coords() {
        assert!((0.0..1.0).contains(&x) && (0.0..1.0).contains(&y));
    }
}

#[test]
fn native_and_tsplib_round_trips_are_bit_exact() {
    for seed in 0..20 {
        let inst = Instance::random(37, seed).unwrap();
        let native = Instance::from_text(&inst.to_text()).unwrap();
        let tsplib = Instance::parse_tsplib(&inst.to_tsplib()).unwrap();
        for ((a, b), c) in inst.coords().iter().zip(native.coords()).zip(tsplib.coords()) {
            assert_eq!(a.0.to_bits(), b.0.to_bits());
            assert_eq!(a.1.to_bits(), b.1.to_bits());
            assert_eq!(a.0.to_bits(), c.0.to_bits());
            assert_eq!(a.1.to_bits(), c.1.to_bits());
        }
    }
}

#[test]
fn tsplib_errors_name_the_line() {
    let doc = "NAME : bad\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 zero\n3 0 1\nEOF\n";
    match Instance::parse_tsplib(doc) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let geo = doc.replace("EUC_2D", "GEO");
    assert!(matches!(Instance::parse_tsplib(&geo), Err(Error::Parse { line: 4, .. })));
}

#[test]
fn tsplib_rounding_uses_nint() {
    let inst = Instance::new(vec![(0.0, 0.0), (3.0, 4.0), (0.0, 1.4)]).unwrap();
    let d = DistanceMatrix::tsplib_rounded(&inst);
    assert_eq!(d.get(0, 1), 5.0);
    assert_eq!(d.get(0, 2), 1.0);
}

#[test]
fn tour_and_heatmap_files_round_trip() {
    let inst = Instance::random(25, 4).unwrap();
    let tour = random_tour(25, 9);
    let len = tour.length(&inst.distance_matrix()).unwrap();
    let (back, back_len) = Tour::from_text(&tour.to_text(len)).unwrap();
    assert_eq!(back, tour);
    assert_eq!(back_len.to_bits(), len.to_bits());

    let h = HeatMap::new(Array2::from_shape_fn((5, 5), |(i, j)| (i * 5 + j) as f64 / 7.0)).unwrap();
    let back = HeatMap::from_text(&h.to_text()).unwrap();
    assert_eq!(back.matrix(), h.matrix());
}

#[test]
fn tour_file_rejects_repeated_city() {
    let text = "UTSP-TOUR v1\n3\n0 1 1\n2.0\n";
    assert!(matches!(Tour::from_text(text), Err(Error::Parse { line: 3, .. })));
}

#[test]
fn svg_of_hundred_cities_has_hundred_segments_and_markers() {
    let inst = Instance::random(100, 2).unwrap();
    let svg = tour_svg(&inst, &random_tour(100, 2)).unwrap();
    assert_eq!(svg.matches("<line").count(), 100);
    assert_eq!(svg.matches("<circle").count(), 100);
}

#[test]
#[ignore = "regenerates tests/data; run manually after an intentional format change"]
fn regenerate_golden() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/random_n10_seed1.txt");
    std::fs::write(path, Instance::random(10, 1).unwrap().to_text()).unwrap();
}
