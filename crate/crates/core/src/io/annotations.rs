//! Annotation CSV: `recording_id,t_start,t_end,f_lo,f_hi,label`.

use std::path::Path;

use crate::dataset::{Annotation, ClassLabel};
use crate::error::{Error, Result};

pub const HEADER: [&str; 6] = ["recording_id", "t_start", "t_end", "f_lo", "f_hi", "label"];

fn schema_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::CsvSchema {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Read and validate an annotation CSV. Row-level violations are reported
/// with their line numbers; unknown labels pass through as
/// [`ClassLabel::Other`].
pub fn read_annotations(path: &Path) -> Result<Vec<Annotation>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| schema_err(path, 1, e.to_string()))?;

    let headers = reader
        .headers()
        .map_err(|e| schema_err(path, 1, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(schema_err(
            path,
            1,
            format!("expected header {:?}, found {:?}", HEADER.join(","), headers),
        ));
    }

    let mut annotations = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| schema_err(path, 0, e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != HEADER.len() {
            return Err(schema_err(
                path,
                line,
                format!("expected {} fields, found {}", HEADER.len(), record.len()),
            ));
        }
        let num = |idx: usize, name: &str| -> Result<f64> {
            record[idx]
                .parse::<f64>()
                .map_err(|_| schema_err(path, line, format!("bad {name} value {:?}", &record[idx])))
        };
        let anno = Annotation::new(
            &record[0],
            num(1, "t_start")?,
            num(2, "t_end")?,
            num(3, "f_lo")?,
            num(4, "f_hi")?,
            ClassLabel::parse(&record[5]),
        )
        .map_err(|e| schema_err(path, line, e.to_string()))?;
        annotations.push(anno);
    }
    Ok(annotations)
}

pub fn write_annotations(path: &Path, annotations: &[Annotation]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut writer = csv::Writer::from_path(path).map_err(|e| schema_err(path, 0, e.to_string()))?;
    writer
        .write_record(HEADER)
        .map_err(|e| schema_err(path, 1, e.to_string()))?;
    for anno in annotations {
        writer
            .write_record([
                anno.recording_id.as_str(),
                &anno.t_start_s.to_string(),
                &anno.t_end_s.to_string(),
                &anno.f_lo_hz.to_string(),
                &anno.f_hi_hz.to_string(),
                anno.label.as_str(),
            ])
            .map_err(|e| schema_err(path, 0, e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(content: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("annotations.csv");
        std::fs::write(&path, content).unwrap();
        (dir, path)
    }

    #[test]
    fn parses_simple_rows() {
        let (_d, path) = write_tmp(
            "recording_id,t_start,t_end,f_lo,f_hi,label\nrec1,100.0,104.0,15.0,25.0,BW\n",
        );
        let annos = read_annotations(&path).unwrap();
        assert_eq!(annos.len(), 1);
        assert_eq!(annos[0].recording_id, "rec1");
        assert_eq!(annos[0].t_start_s, 100.0);
        assert_eq!(annos[0].t_end_s, 104.0);
        assert_eq!(annos[0].label, ClassLabel::Bw);
    }

    #[test]
    fn header_only_file_is_empty() {
        let (_d, path) = write_tmp("recording_id,t_start,t_end,f_lo,f_hi,label\n");
        assert!(read_annotations(&path).unwrap().is_empty());
    }

    #[test]
    fn inverted_times_error_with_line_number() {
        let (_d, path) = write_tmp(
            "recording_id,t_start,t_end,f_lo,f_hi,label\n\
             rec1,1.0,2.0,10.0,20.0,BW\n\
             rec1,9.0,4.0,10.0,20.0,BW\n",
        );
        match read_annotations(&path) {
            Err(Error::CsvSchema { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected CsvSchema, got {other:?}"),
        }
    }

    #[test]
    fn unknown_labels_pass_through() {
        let (_d, path) = write_tmp(
            "recording_id,t_start,t_end,f_lo,f_hi,label\nrec1,1.0,2.0,10.0,20.0,HB\n",
        );
        let annos = read_annotations(&path).unwrap();
        assert_eq!(annos[0].label, ClassLabel::Other("HB".into()));
    }

    #[test]
    fn wrong_header_rejected() {
        let (_d, path) = write_tmp("id,start,end,lo,hi,label\n");
        assert!(read_annotations(&path).is_err());
    }

    #[test]
    fn round_trip_preserves_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        let annos = vec![
            Annotation::new("rec1", 0.125, 7.5, 17.3, 25.0, ClassLabel::Bw).unwrap(),
            Annotation::new("rec2", 1e-3, 2.0000001, 10.0, 20.0, ClassLabel::Other("XX".into()))
                .unwrap(),
        ];
        write_annotations(&path, &annos).unwrap();
        assert_eq!(read_annotations(&path).unwrap(), annos);
    }
}
