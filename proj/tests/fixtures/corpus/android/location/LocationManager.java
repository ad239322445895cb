package android.location;

import android.content.Context;

/**
 * This class provides access to the system location services.
 */
public class LocationManager {
    private final Context mContext;
    private Location mLastLocation;

    /**
     * Gets the last known location from the given provider.
     *
     * @param provider a provider listed by {@link #getAllProviders()}
     * @return the last known location for the given provider, or null if not available
     */
    public Location getLastKnownLocation(String provider) {
        if (provider == null) {
            throw new IllegalArgumentException("invalid provider: " + provider);
        }
        return mLastLocation;
    }

    /**
     * Register for location updates from the given provider with the given arguments.
     */
    public void requestLocationUpdates(String provider, long minTimeMs, float minDistanceM,
            LocationListener listener) {
        if (listener != null && mLastLocation != null) {
            listener.onLocationChanged(mLastLocation);
        }
    }

    /** Returns the current enabled/disabled status of the given provider. */
    protected boolean isProviderEnabled(String provider) {
        return true;
    }

    void setLastLocation(Location location) {
        mLastLocation = location;
    }
}
