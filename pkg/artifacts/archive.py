# artifacts/archive.py
"""
Run archives: a ZIP of one output directory plus its SHA-256, optionally
uploaded to S3-compatible storage (Cloudflare R2).
"""

import logging
import zipfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Union

from config import (
    ARCHIVE_OUTPUT_DIR,
    R2_ACCESS_KEY_ID,
    R2_BUCKET_NAME,
    R2_ENDPOINT_URL,
    R2_SECRET_ACCESS_KEY,
    TOOL_NAME,
)
from errors import IoFailure
from .fingerprint import hash_file
from .run_manifest import RUN_MANIFEST_FILE, RunManifest

# boto3 for S3-compatible storage (Cloudflare R2)
try:
    import boto3
    from botocore.config import Config
    BOTO3_AVAILABLE = True
except ImportError:
    BOTO3_AVAILABLE = False

logger = logging.getLogger("ARTIFACTS")


@dataclass
class RunArchive:
    """A built run archive."""
    run_name: str
    command: str
    zip_path: str
    zip_sha256: str
    size_bytes: int
    file_count: int
    created_at: str
    uploaded: bool = False
    storage_url: Optional[str] = None
    storage_key: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "run_name": self.run_name,
            "command": self.command,
            "zip_path": self.zip_path,
            "zip_sha256": self.zip_sha256,
            "size_bytes": self.size_bytes,
            "file_count": self.file_count,
            "created_at": self.created_at,
            "uploaded": self.uploaded,
            "storage_url": self.storage_url,
            "storage_key": self.storage_key,
        }


class RunArchiver:
    """
    Packs output directories for long-term storage.

    Uploading needs boto3 and all three R2 settings; without them archives
    are built locally only.
    """

    def __init__(
        self,
        output_dir: Union[str, Path] = ARCHIVE_OUTPUT_DIR,
        r2_endpoint_url: Optional[str] = R2_ENDPOINT_URL,
        r2_access_key_id: Optional[str] = R2_ACCESS_KEY_ID,
        r2_secret_access_key: Optional[str] = R2_SECRET_ACCESS_KEY,
        r2_bucket_name: Optional[str] = R2_BUCKET_NAME,
    ):
        self.output_dir = Path(output_dir)
        self.r2_endpoint_url = r2_endpoint_url
        self.r2_bucket_name = r2_bucket_name
        self._s3_client = None

        if r2_endpoint_url and r2_access_key_id and r2_secret_access_key and BOTO3_AVAILABLE:
            try:
                self._s3_client = boto3.client(
                    's3',
                    endpoint_url=r2_endpoint_url,
                    aws_access_key_id=r2_access_key_id,
                    aws_secret_access_key=r2_secret_access_key,
                    config=Config(
                        signature_version='s3v4',
                        retries={'max_attempts': 3}
                    ),
                )
                logger.info(f"R2 client initialized: {r2_bucket_name}")
            except Exception as e:
                logger.warning(f"Failed to initialize R2 client: {e}")
                self._s3_client = None
        elif r2_endpoint_url and not BOTO3_AVAILABLE:
            logger.warning("boto3 not available, upload disabled")

    @property
    def can_upload(self) -> bool:
        return self._s3_client is not None and bool(self.r2_bucket_name)

    @staticmethod
    def _collect(run_dir: Path) -> List[Path]:
        return sorted(p for p in run_dir.rglob("*") if p.is_file())

    def build(self, run_dir: Union[str, Path]) -> RunArchive:
        """
        Zip every file under ``run_dir`` (paths stored relative to it).

        Raises:
            IoFailure: run_dir has no run_manifest.json or cannot be read
        """
        run_dir = Path(run_dir).resolve()
        if not (run_dir / RUN_MANIFEST_FILE).is_file():
            raise IoFailure("Not a run directory (run_manifest.json missing)", path=str(run_dir))
        manifest = RunManifest.load(run_dir)
        created = datetime.now(timezone.utc)
        stamp = created.strftime("%Y%m%dT%H%M%SZ")
        zip_path = self.output_dir / f"{TOOL_NAME}_{manifest.command}_{run_dir.name}_{stamp}.zip"

        files = self._collect(run_dir)
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            with zipfile.ZipFile(zip_path, 'w', zipfile.ZIP_DEFLATED) as zf:
                for path in files:
                    zf.write(path, arcname=path.relative_to(run_dir).as_posix())
        except OSError as e:
            raise IoFailure(f"Cannot build archive: {e.strerror or e}", path=str(zip_path)) from e

        archive = RunArchive(
            run_name=run_dir.name,
            command=manifest.command,
            zip_path=str(zip_path),
            zip_sha256=hash_file(zip_path),
            size_bytes=zip_path.stat().st_size,
            file_count=len(files),
            created_at=created.isoformat().replace("+00:00", "Z"),
        )
        logger.info(f"Archive built: {zip_path.name}")
        logger.info(f"SHA256: {archive.zip_sha256}")
        logger.info(f"Size: {archive.size_bytes} bytes, Files: {archive.file_count}")
        return archive

    def upload(self, archive: RunArchive) -> bool:
        """Upload to ``runs/{command}/{year}/{month}/{run_name}.zip``."""
        if not self.can_upload:
            logger.warning("Upload skipped: R2 not configured")
            return False

        created = datetime.fromisoformat(archive.created_at.replace("Z", "+00:00"))
        storage_key = f"runs/{archive.command}/{created.year}/{created.month:02d}/{Path(archive.zip_path).name}"
        try:
            with open(archive.zip_path, 'rb') as f:
                self._s3_client.put_object(
                    Bucket=self.r2_bucket_name,
                    Key=storage_key,
                    Body=f,
                    ContentType='application/zip',
                    Metadata={
                        'run_name': archive.run_name,
                        'command': archive.command,
                        'sha256': archive.zip_sha256,
                    }
                )
        except Exception as e:
            logger.error(f"Upload failed: {e}")
            return False

        archive.storage_key = storage_key
        archive.storage_url = f"{self.r2_endpoint_url}/{self.r2_bucket_name}/{storage_key}"
        archive.uploaded = True
        logger.info(f"Uploaded to R2: {storage_key}")
        return True

    def verify(self, zip_path: Union[str, Path], expected_sha256: str) -> bool:
        """Re-hash an archive and compare."""
        zip_path = Path(zip_path)
        if not zip_path.is_file():
            raise IoFailure("Archive not found", path=str(zip_path))
        actual = hash_file(zip_path)
        if actual == expected_sha256.lower():
            logger.info(f"Verification PASSED: {expected_sha256[:16]}...")
            return True
        logger.error(f"Verification FAILED: expected {expected_sha256}, actual {actual}")
        return False
