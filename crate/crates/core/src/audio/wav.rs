use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::{AudioBuffer, AudioError};

fn format_err(path: &Path, message: impl Into<String>) -> AudioError {
    AudioError::Format { path: path.display().to_string(), message: message.into() }
}

fn truncated(path: &Path) -> AudioError {
    let offset = std::fs::metadata(path).map(|m| m.len()).unwrap_or(0);
    AudioError::Truncated { path: path.display().to_string(), offset }
}

fn map_hound(path: &Path, err: hound::Error) -> AudioError {
    match err {
        hound::Error::IoError(e)
            if e.kind() == std::io::ErrorKind::UnexpectedEof || e.to_string().contains("read enough bytes") =>
        {
            truncated(path)
        }
        hound::Error::IoError(source) => AudioError::Io { path: path.display().to_string(), source },
        other => format_err(path, other.to_string()),
    }
}

/// Decodes PCM (integer or float) RIFF/WAVE. Multi-channel input is
/// downmixed by averaging.
pub fn decode_wav(path: impl AsRef<Path>) -> Result<AudioBuffer, AudioError> {
    let path = path.as_ref();
    let mut reader = WavReader::open(path).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    if spec.sample_rate == 0 || spec.channels == 0 {
        return Err(format_err(path, "zero sample rate or channel count"));
    }
    let channels = spec.channels as usize;
    let interleaved: Vec<f32> = match spec.sample_format {
        SampleFormat::Float => reader
            .samples::<f32>()
            .collect::<Result<_, _>>()
            .map_err(|e| map_hound(path, e))?,
        SampleFormat::Int => {
            let scale = (1u64 << (spec.bits_per_sample - 1)) as f32;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f32 / scale))
                .collect::<Result<_, _>>()
                .map_err(|e| map_hound(path, e))?
        }
    };
    if !interleaved.len().is_multiple_of(channels) {
        return Err(truncated(path));
    }
    let samples = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(channels)
            .map(|frame| frame.iter().sum::<f32>() / channels as f32)
            .collect()
    };
    Ok(AudioBuffer::new(samples, spec.sample_rate))
}

/// Writes 16-bit (or 8/24/32-bit) integer PCM, mono, via a temp file and
/// rename.
pub fn encode_wav(buffer: &AudioBuffer, path: impl AsRef<Path>, bit_depth: u16) -> Result<(), AudioError> {
    let path = path.as_ref();
    if !matches!(bit_depth, 8 | 16 | 24 | 32) {
        return Err(format_err(path, format!("unsupported bit depth {bit_depth}")));
    }
    let spec = WavSpec {
        channels: 1,
        sample_rate: buffer.sample_rate,
        bits_per_sample: bit_depth,
        sample_format: SampleFormat::Int,
    };
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let scale = (1i64 << (bit_depth - 1)) as f64;
    let (lo, hi) = (-scale, scale - 1.0);
    {
        let mut writer = WavWriter::create(&tmp, spec).map_err(|e| map_hound(&tmp, e))?;
        for &x in &buffer.samples {
            let v = (x as f64 * scale).round().clamp(lo, hi) as i32;
            writer.write_sample(v).map_err(|e| map_hound(&tmp, e))?;
        }
        writer.finalize().map_err(|e| map_hound(&tmp, e))?;
    }
    std::fs::rename(&tmp, path)
        .map_err(|source| AudioError::Io { path: path.display().to_string(), source })
}
