from .mnist_loader_adapter import IdxMnistLoaderAdapter

__all__ = ["IdxMnistLoaderAdapter"]
