use std::io::{self, Write};

/// Drops output once the reader has gone away (e.g. `qident ... | head`),
/// so the command still exits with its own status and no spurious error.
struct Stdout<W> {
    inner: W,
    closed: bool,
}

impl<W: Write> Write for Stdout<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        if self.closed {
            return Ok(buf.len());
        }
        match self.inner.write(buf) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {
                self.closed = true;
                Ok(buf.len())
            }
            r => r,
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self.inner.flush() {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            r => r,
        }
    }
}

fn main() {
    let mut out = Stdout {
        inner: io::stdout().lock(),
        closed: false,
    };
    let code = qident::cli::run(std::env::args_os(), &mut out, &mut io::stderr().lock());
    let _ = out.flush();
    std::process::exit(code);
}
