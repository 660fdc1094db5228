# Config Layer
