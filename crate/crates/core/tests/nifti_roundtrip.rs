use proptest::prelude::*;
use tumorseg::fixtures::{generate, random_probs, random_tumor_spec};
use tumorseg::nifti::{
    self, read_label_volume, read_prob_volume, read_volume, write_f32_volume, write_label_volume_with,
    write_prob_volume, DataType, Endianness, NiftiHeader, VoxelData, HEADER_SIZE,
};
use tumorseg::{ChannelOrder, Dims, Error, LabelMap, NiftiError, ProbSource, RegionId, Spacing, Volume, WriteOptions};

fn options() -> Vec<(WriteOptions, &'static str)> {
    let mut out = Vec::new();
    for endianness in [Endianness::Little, Endianness::Big] {
        out.push((WriteOptions { endianness, gzip: Some(false) }, "nii"));
        out.push((WriteOptions { endianness, gzip: Some(true) }, "nii.gz"));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn labels_round_trip(seed in any::<u64>(), dz in 0.5f32..3.0) {
        // pixdim is single precision on disk
        let dz = dz as f64;
        let dir = tempfile::tempdir().unwrap();
        let (labels, _) = generate(&random_tumor_spec([20, 18, 14], seed)).unwrap();
        let spacing = Spacing::new(1.0, 0.9375, dz).unwrap();
        let labels = tumorseg::LabelVolume::new(labels.dims(), spacing, labels.codes().to_vec()).unwrap();
        for (i, (opts, ext)) in options().into_iter().enumerate() {
            let path = dir.path().join(format!("l{i}.{ext}"));
            write_label_volume_with(&path, &labels, opts).unwrap();
            let back = read_label_volume(&path, &LabelMap::identity()).unwrap();
            prop_assert_eq!(&back, &labels);
            let raw = read_volume(&path).unwrap();
            prop_assert_eq!(raw.header.endianness, opts.endianness);
            prop_assert_eq!(raw.spacing, spacing);
        }
    }

    #[test]
    fn probabilities_round_trip(seed in any::<u64>()) {
        let dir = tempfile::tempdir().unwrap();
        let spacing = Spacing::new(1.25, 1.0, 2.5).unwrap();
        let probs = random_probs(Dims::new(9, 7, 5).unwrap(), spacing, seed);
        let order: ChannelOrder = "ET,WT,TC".parse().unwrap();
        for (i, (opts, ext)) in options().into_iter().enumerate() {
            let path = dir.path().join(format!("p{i}.{ext}"));
            write_prob_volume(&path, &probs, order, opts).unwrap();
            let back = read_prob_volume(&ProbSource::FourD(path), order).unwrap();
            prop_assert_eq!(&back, &probs);
        }
    }
}

#[test]
fn float_volume_bits_survive() {
    let dir = tempfile::tempdir().unwrap();
    let dims = Dims::new(5, 4, 3).unwrap();
    let vol = Volume::from_fn(dims, Spacing::unit(), |[x, y, z]| (x as f32 * 0.1 - y as f32) / (z as f32 + 0.3));
    for (i, (opts, ext)) in options().into_iter().enumerate() {
        let path = dir.path().join(format!("f{i}.{ext}"));
        write_f32_volume(&path, &vol, opts).unwrap();
        let back = read_volume(&path).unwrap();
        assert_eq!(back.data, VoxelData::F32(vol.data().to_vec()));
    }
}

#[test]
fn gz_and_plain_decode_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (labels, _) = generate(&random_tumor_spec([16, 16, 16], 5)).unwrap();
    let plain = dir.path().join("a.nii");
    let gz = dir.path().join("a.nii.gz");
    write_label_volume_with(&plain, &labels, WriteOptions::default()).unwrap();
    write_label_volume_with(&gz, &labels, WriteOptions::default()).unwrap();
    assert_eq!(std::fs::read(&gz).unwrap()[..2], [0x1f, 0x8b]);
    assert_eq!(read_volume(&plain).unwrap(), read_volume(&gz).unwrap());
}

#[test]
fn brats_geometry_header_parses() {
    let dims = Dims::new(240, 240, 155).unwrap();
    let header = NiftiHeader::new(dims, 1, Spacing::unit(), DataType::I16);
    let parsed = NiftiHeader::parse(&header.to_bytes()).unwrap();
    assert_eq!(parsed.shape().unwrap(), (dims, 1));
    assert_eq!(parsed.spacing().unwrap(), Spacing::unit());
}

#[test]
fn small_zero_file_has_expected_size() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.nii");
    let labels = tumorseg::LabelVolume::background(Dims::cube(8), Spacing::unit());
    write_label_volume_with(&path, &labels, WriteOptions::default()).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 864);
}

#[test]
fn truncated_header_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.nii");
    std::fs::write(&path, vec![0u8; HEADER_SIZE - 1]).unwrap();
    assert!(matches!(
        read_volume(&path),
        Err(Error::Nifti(NiftiError::TruncatedFile { .. }))
    ));
}

#[test]
fn truncated_body_is_rejected() {
    let header = NiftiHeader::new(Dims::cube(4), 1, Spacing::unit(), DataType::U8);
    let bytes = nifti::encode(&header, &VoxelData::U8(vec![0; 64]));
    assert!(matches!(
        nifti::decode(&bytes[..bytes.len() - 1]),
        Err(Error::Nifti(NiftiError::TruncatedFile { .. }))
    ));
}

#[test]
fn unwritable_and_missing_paths_report_io() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("no/such/dir/x.nii");
    let labels = tumorseg::LabelVolume::background(Dims::cube(2), Spacing::unit());
    match write_label_volume_with(&bad, &labels, WriteOptions::default()) {
        Err(Error::Nifti(NiftiError::Io { path, .. })) => assert_eq!(path, bad),
        other => panic!("expected io error, got {other:?}"),
    }
    assert!(matches!(read_volume(&bad), Err(Error::Nifti(NiftiError::Io { .. }))));
}

#[test]
fn out_of_range_probability_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.nii");
    let dims = Dims::cube(3);
    let mut data = vec![0.5f32; 27 * 3];
    data[40] = 1.7;
    let header = NiftiHeader::new(dims, 3, Spacing::unit(), DataType::F32);
    nifti::write_volume(&path, &header, &VoxelData::F32(data), WriteOptions::default()).unwrap();
    match read_prob_volume(&ProbSource::FourD(path), ChannelOrder::default()) {
        Err(Error::ProbabilityOutOfRange { channel, index, value }) => {
            assert_eq!((channel, index), (1, 13));
            assert!((value - 1.7).abs() < 1e-6);
        }
        other => panic!("expected range error, got {other:?}"),
    }
}

#[test]
fn channel_files_with_different_dims_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let paths: [std::path::PathBuf; 3] = std::array::from_fn(|k| dir.path().join(format!("c{k}.nii")));
    for (k, p) in paths.iter().enumerate() {
        let n = if k == 2 { 5 } else { 4 };
        let v = Volume::filled(Dims::cube(n), Spacing::unit(), 0.25f32);
        write_f32_volume(p, &v, WriteOptions::default()).unwrap();
    }
    assert!(matches!(
        read_prob_volume(&ProbSource::Channels(paths), ChannelOrder::default()),
        Err(Error::GeometryMismatch(_))
    ));
}

#[test]
fn legacy_code_four_is_remapped_on_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.nii.gz");
    let header = NiftiHeader::new(Dims::cube(2), 1, Spacing::unit(), DataType::U8);
    nifti::write_volume(&path, &header, &VoxelData::U8(vec![0, 1, 2, 4, 0, 0, 0, 4]), WriteOptions::default()).unwrap();
    let labels = read_label_volume(&path, &LabelMap::default()).unwrap();
    assert_eq!(labels.codes(), &[0, 1, 2, 3, 0, 0, 0, 3]);
    assert_eq!(tumorseg::compose_region(&labels, RegionId::Et).count(), 2);
    assert!(read_label_volume(&path, &LabelMap::identity()).is_err());
}
