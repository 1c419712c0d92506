mod common;

use cassi::container::{decode, encode, read_container, read_measurements, write_container, ContainerObject, Dtype};
use cassi::{CodedAperture, Error, SensingConfig};
use common::*;
use proptest::prelude::*;
use std::path::Path;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cube_roundtrip(c in 1usize..4, h in 1usize..6, w in 1usize..6, seed in any::<u64>()) {
        let cfg = SensingConfig::new(h, w, c, 1, 1).unwrap();
        let cube = uniform_cube(&cfg, seed);
        let obj = ContainerObject::from(cube.clone());
        let (back, dtype) = decode(&encode(&obj, Dtype::F64).unwrap(), Path::new("mem")).unwrap();
        prop_assert_eq!(dtype, Dtype::F64);
        prop_assert_eq!(back.into_cube().unwrap(), cube.clone());

        let (back, _) = decode(&encode(&obj, Dtype::F32).unwrap(), Path::new("mem")).unwrap();
        let back = back.into_cube().unwrap();
        let expected: Vec<f64> = cube.data().iter().map(|v| *v as f32 as f64).collect();
        prop_assert_eq!(back.data(), expected.as_slice());
    }

    #[test]
    fn measurement_stack_roundtrip(n in 1usize..4, seed in any::<u64>()) {
        let cfg = SensingConfig::new(3, 4, 2, 2, n).unwrap();
        let y = uniform_measurements(&cfg, seed);
        let (back, _) = decode(&encode(&y.clone().into(), Dtype::F64).unwrap(), Path::new("mem")).unwrap();
        prop_assert_eq!(back.into_measurements().unwrap(), y);
    }
}

#[test]
fn files_roundtrip_and_reject_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SensingConfig::new(4, 4, 3, 1, 1).unwrap();
    let cube = uniform_cube(&cfg, 1);
    let path = dir.path().join("cube.hsc");
    write_container(&cube.clone().into(), &path, Dtype::F64).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], &[0x48, 0x53, 0x43, 0x31]);
    assert!(bytes.len() >= 48 * 8);
    assert_eq!(read_container(&path).unwrap().into_cube().unwrap(), cube);

    let mask = CodedAperture::from_values(4, 4, vec![0.25; 16]).unwrap();
    let mpath = dir.path().join("mask.hsc");
    write_container(&mask.clone().into(), &mpath, Dtype::F64).unwrap();
    assert_eq!(read_container(&mpath).unwrap().into_aperture().unwrap(), mask);

    let ypath = dir.path().join("y.hsc");
    let y = uniform_measurements(&cfg, 2);
    write_container(&y.get(0).clone().into(), &ypath, Dtype::F64).unwrap();
    let back = read_measurements(&ypath).unwrap();
    assert_eq!(back.get(0).width(), cfg.measurement_width());

    let mut bad = bytes.clone();
    bad[..4].copy_from_slice(b"XXXX");
    let bad_path = dir.path().join("bad.hsc");
    std::fs::write(&bad_path, &bad).unwrap();
    assert!(matches!(read_container(&bad_path), Err(Error::Format { .. })));
    std::fs::write(&bad_path, &bytes[..bytes.len() - 3]).unwrap();
    assert!(matches!(read_container(&bad_path), Err(Error::Format { .. })));
}
